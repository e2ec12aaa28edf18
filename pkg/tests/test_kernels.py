import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from camoscat import _accel, kernels


def _both(fn, *args):
    out = []
    for name in ("numpy", "numba") if _accel.HAVE_NUMBA else ("numpy",):
        prev = _accel.backend()
        _accel.set_backend(name)
        try:
            out.append(fn(*args))
        finally:
            _accel.set_backend(prev)
    return out


def test_cell_operator_kills_constants(backend):
    rng = np.random.default_rng(0)
    ax, ay = rng.uniform(0.5, 2, (2, 16, 8))
    out = kernels.cell_operator(np.full((16, 8), 3.0), ax, ay, 1 / 16, 1 / 8)
    assert np.abs(out).max() < 1e-10


def test_cell_operator_matches_laplacian_of_cosine(backend):
    n = 64
    x = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    u = np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    ones = np.ones((n, n))
    lap = kernels.cell_operator(u, ones, ones, 1 / n, 1 / n)
    exact = -8 * np.pi**2 * u
    assert np.abs(lap - exact).max() / np.abs(exact).max() < 2e-3


@settings(max_examples=25, deadline=None)
@given(arrays(float, (8, 16), elements=st.floats(-1, 1)),
       arrays(float, (8, 16), elements=st.floats(0.1, 10)),
       arrays(float, (8, 16), elements=st.floats(0.1, 10)))
def test_cell_operator_backends_agree(u, ax, ay):
    outs = _both(kernels.cell_operator, u, ax, ay, 0.125, 0.0625)
    for o in outs[1:]:
        np.testing.assert_allclose(o, outs[0], rtol=1e-12, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(arrays(float, (8, 16), elements=st.floats(-1, 1)),
       arrays(float, (8, 16), elements=st.floats(-1, 1)),
       arrays(float, (8, 16), elements=st.floats(0.1, 10)),
       arrays(float, (8, 16), elements=st.floats(0.1, 10)))
def test_cell_operator_is_symmetric(u, v, ax, ay):
    Lu = kernels.cell_operator(u, ax, ay, 0.125, 0.0625)
    Lv = kernels.cell_operator(v, ax, ay, 0.125, 0.0625)
    assert abs(np.sum(v * Lu) - np.sum(u * Lv)) <= 1e-9 * (1 + np.abs(u).sum() * np.abs(v).sum() * 1e3)


def test_points_in_square(backend):
    vx = np.array([0.0, 1.0, 1.0, 0.0])
    vy = np.array([0.0, 0.0, 1.0, 1.0])
    got = kernels.points_in_polygon(np.array([0.5, 1.5, 0.1, -0.1]), np.array([0.5, 0.5, 0.9, 0.5]), vx, vy)
    assert got.tolist() == [True, False, True, False]


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**31 - 1))
def test_point_in_polygon_backends_agree(m, seed):
    rng = np.random.default_rng(seed)
    ang = np.sort(rng.uniform(0, 2 * np.pi, m))
    r = rng.uniform(0.3, 1.0, m)
    vx, vy = r * np.cos(ang), r * np.sin(ang)
    px, py = rng.uniform(-1, 1, (2, 200))
    outs = _both(kernels.points_in_polygon, px, py, vx, vy)
    for o in outs[1:]:
        assert np.array_equal(o, outs[0])


def test_simple_and_crossing_polylines(backend):
    t = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    assert kernels.polyline_is_simple(np.cos(t), np.sin(t))
    # figure eight crosses itself
    s = t + 0.03
    assert not kernels.polyline_is_simple(np.sin(s), np.sin(2 * s))


def test_backend_switch_rejects_unknown():
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")
