import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from camoscat import oracles
from camoscat.homogenization import (effective_permittivity, effective_tensor, homogenize, solve_corrector,
                                     voigt_reuss_bounds)
from camoscat.model import Ellipse, MaterialSet, Stripe, UnitCell


def _mat(mu_host=1.0, mu_B=5.0, eps_host=1.0, eps_B=1.0):
    return MaterialSet(1, 1, 1, 1, mu_host, eps_host, mu_B, eps_B, 1, 1)


DISC = UnitCell(1, 1, Ellipse((0.5, 0.5), (0.3, 0.3)))
LAMINATE = UnitCell(1, 1, Stripe(0.25, 0.75))


def test_homogeneous_cell_has_no_corrector(backend):
    chi = solve_corrector(DISC, _mat(2.0, 2.0), (32, 32))
    assert np.abs(chi.chi1).max() == 0 and np.abs(chi.chi2).max() == 0
    A, _ = effective_tensor(chi)
    np.testing.assert_allclose(A, np.eye(2) / 2.0, atol=1e-15)


def test_laminate_matches_layer_formulas(backend):
    chi = solve_corrector(LAMINATE, _mat(), (64, 64))
    A, _ = effective_tensor(chi)
    exact = oracles.laminate_tensor([1.0, 5.0], [0.5, 0.5])
    np.testing.assert_allclose(A, exact, atol=1e-10)
    assert np.abs(chi.chi1).max() < 1e-12
    # one-dimensional flux balance: a (1 - d chi2/dy2) = A22 on every face
    slope = (np.roll(chi.chi2, -1, axis=1) - chi.chi2) / chi.h2
    np.testing.assert_allclose(slope, 1.0 - exact[1, 1] / chi.ay, atol=1e-9)


def test_disc_corrector_contract():
    chi = solve_corrector(DISC, _mat(), (256, 256))
    assert max(chi.residuals) < 1e-10
    for c in (chi.chi1, chi.chi2):
        assert abs(c.mean()) < 1e-12
    # chi1 is odd about the vertical centre line, chi2 about the horizontal one
    np.testing.assert_allclose(chi.chi1, -chi.chi1[::-1, :], atol=1e-9)
    np.testing.assert_allclose(chi.chi2, -chi.chi2[:, ::-1], atol=1e-9)


def test_disc_tensor_is_diagonal():
    A, defect = effective_tensor(solve_corrector(DISC, _mat(), (128, 128)))
    assert abs(A[0, 1]) < 1e-8 and abs(A[1, 0]) < 1e-8
    assert defect < 1e-8


@pytest.mark.parametrize("frac, eps_B, eps_host, expected", [(0.25, 2.0, 1.0, 1.25), (0.5, 3.0, 3.0, 3.0)])
def test_effective_permittivity_examples(frac, eps_B, eps_host, expected):
    cell = UnitCell(1, 1, Stripe(0.5 - frac / 2, 0.5 + frac / 2))
    assert effective_permittivity(cell, _mat(eps_host=eps_host, eps_B=eps_B)) == pytest.approx(expected)


def test_small_inclusion_limit_of_permittivity():
    cell = UnitCell(1, 1, Ellipse((0.5, 0.5), (1e-4, 1e-4)))
    assert effective_permittivity(cell, _mat(eps_host=2.0, eps_B=7.0)) == pytest.approx(2.0, abs=1e-6)


def test_homogenize_reports_richardson_estimate():
    eff = homogenize(DISC, _mat(), (256, 256))
    A128, _ = effective_tensor(solve_corrector(DISC, _mat(), (128, 128)))
    assert np.all(np.abs(eff.A - A128) <= 4 * eff.richardson + 1e-15)
    assert eff.eps_minus == pytest.approx(1.0)


def test_grid_must_be_power_of_two():
    with pytest.raises(ValueError):
        solve_corrector(DISC, _mat(), (48, 48))
    with pytest.raises(ValueError):
        solve_corrector(DISC, _mat(), (8, 8))


@settings(max_examples=8, deadline=None)
@given(st.floats(0.2, 5.0))
def test_scaling_equivariance(c):
    m = _mat(1.0, 4.0)
    A = effective_tensor(solve_corrector(DISC, m, (32, 32)))[0]
    Ac = effective_tensor(solve_corrector(DISC, m.replace(mu_host=c, mu_B=4.0 * c), (32, 32)))[0]
    np.testing.assert_allclose(Ac, A / c, rtol=1e-9, atol=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 0.4), st.floats(0.05, 0.4), st.floats(0.0, np.pi), st.floats(0.1, 20.0))
def test_voigt_reuss_bracket(a, b, angle, mu_B):
    cell = UnitCell(1, 1, Ellipse((0.5, 0.5), (a, b), angle=angle))
    m = _mat(1.0, mu_B)
    A = effective_tensor(solve_corrector(cell, m, (32, 32)))[0]
    lo, hi = voigt_reuss_bounds(cell, m, (32, 32))
    eig = np.linalg.eigvalsh(0.5 * (A + A.T))
    assert eig.min() >= lo * (1 - 1e-9) and eig.max() <= hi * (1 + 1e-9)
    assert abs(A[0, 1] - A[1, 0]) < 1e-9 * np.abs(A).max()


def test_swap_and_rotate_covariance():
    """Rotating B by a quarter turn swaps the diagonal of A."""
    m = _mat(1.0, 3.0)
    A = effective_tensor(solve_corrector(UnitCell(1, 1, Ellipse((0.5, 0.5), (0.35, 0.15))), m, (64, 64)))[0]
    B = effective_tensor(solve_corrector(UnitCell(1, 1, Ellipse((0.5, 0.5), (0.15, 0.35))), m, (64, 64)))[0]
    assert A[0, 0] == pytest.approx(B[1, 1], rel=1e-10)
    assert A[1, 1] == pytest.approx(B[0, 0], rel=1e-10)
