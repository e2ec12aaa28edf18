"""Every acceptance criterion at its stated tolerance, one PASS/FAIL line each."""
import pytest

from camoscat import validation


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(validation.NUMBERED))
def test_criterion(number, capsys):
    verdict = validation.run_scenario(number)
    with capsys.disabled():
        print(f"\ncriterion {number:2d}: {verdict.summary()}  ({verdict.runtime_s:.1f} s)")
    assert verdict.passed, verdict.summary()
