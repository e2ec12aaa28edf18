import pytest

from camoscat import _accel

BACKENDS = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per kernel backend and restore the previous choice."""
    previous = _accel.backend()
    _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(previous)
