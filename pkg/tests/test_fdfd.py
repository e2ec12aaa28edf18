import math

import numpy as np
import pytest
from scipy import special

from camoscat import fdfd, validation
from camoscat.errors import ResidualTooHigh, WindowOutsideGrid
from camoscat.fdfd import (PML, DirectProblem, EffectiveLayeredMedium, Grid, MultiscaleMedium, UniformMedium,
                           compare_fields, direct_solve, graded_edges, layered_reference, plane_wave_reference,
                           richardson, uniform_edges)
from camoscat.homogenization import homogenize
from camoscat.layered import LayeredMedium, background_field, green
from camoscat.model import IncidentWave
from camoscat.strip import TransmissionCoefficients as TC
from camoscat.strip import layer_coefficients, solve_strip

OMEGA = 2 * math.pi


def _box(half, h, pml=0.6):
    e = uniform_edges(-half, half, h)
    return Grid(e, e, PML((pml,) * 4, OMEGA))


# --- grids ------------------------------------------------------------------------------

def test_graded_edges_hit_breaks_and_grow_gently():
    breaks = [-2.0, -0.3, 0.0, 0.5, 2.0]
    e = graded_edges(breaks, [1 / 20, 1 / 200, 1 / 200, 1 / 20])
    assert np.all(np.diff(e) > 0)
    for b in breaks:
        assert np.min(np.abs(e - b)) < 1e-14
    h = np.diff(e)
    assert np.max(h[1:] / h[:-1]) < 1.3 and np.max(h[:-1] / h[1:]) < 1.3


def test_uniform_edges_contain_zero():
    e = uniform_edges(-0.33, 0.5, 0.1)
    assert np.min(np.abs(e)) < 1e-15 and e[0] <= -0.33 and e[-1] >= 0.5


def test_stretch_is_identity_outside_absorbing_layers():
    g = _box(2.0, 1 / 10)
    s, off = g.stretch1(np.linspace(-1.39, 1.39, 30))
    assert np.all(s == 1) and np.all(off == 0)
    s, off = g.stretch1(np.array([-1.9, 1.9]))
    assert np.all(s.imag > 0) and off[0] < 0 < off[1]


def test_refined_grid_halves_cells():
    g = _box(1.0, 1 / 10)
    r = g.refined()
    assert r.n1 == 2 * g.n1 and r.n2 == 2 * g.n2 and r.h1 == pytest.approx(g.h1 / 2)


# --- comparisons ------------------------------------------------------------------------------

def test_compare_fields_examples():
    rng = np.random.default_rng(0)
    a = rng.normal(size=50) + 1j * rng.normal(size=50)
    assert compare_fields(a, a).relative_l2 == 0.0
    assert compare_fields(a, 1.01 * a).relative_l2 == pytest.approx(0.01, abs=1e-12)
    with pytest.raises(ValueError):
        compare_fields(a, a[:-1])


def test_window_must_avoid_absorbing_layers_and_collar():
    g = _box(2.0, 1 / 10)
    with pytest.raises(WindowOutsideGrid):
        compare_fields(np.ones(3), np.ones(3), window=(-1.9, 0, 0, 1), grid=g)
    with pytest.raises(WindowOutsideGrid):
        compare_fields(np.ones(3), np.ones(3), window=(-1, 1, -0.5, 0.5), grid=g, collar=0.05)


def test_richardson_removes_second_order_error():
    exact = np.array([1.0, 2.0])
    assert np.allclose(richardson(exact + 0.4, exact + 0.1), exact)


def test_interpolation_outside_cell_centres_is_refused():
    sol = direct_solve(DirectProblem(_box(1.0, 1 / 20, 0.4), OMEGA, UniformMedium(1, 1), UniformMedium(1, 1),
                                     plane_wave_reference(OMEGA, (0.6, -0.8))))
    with pytest.raises(WindowOutsideGrid):
        sol.interpolate([0.0], [1.0])


# --- uniform media ----------------------------------------------------------------------------

def test_empty_domain_has_no_scattered_field():
    sol = direct_solve(DirectProblem(_box(1.0, 1 / 20, 0.4), OMEGA, UniformMedium(1, 2), UniformMedium(1, 2),
                                     plane_wave_reference(OMEGA * math.sqrt(2), (0.6, -0.8))))
    assert np.abs(sol.w).max() < 1e-8


def test_point_source_matches_hankel():
    pts = np.array([0.4, 0.7, 1.0])
    vals = []
    for h in (1 / 20, 1 / 40):
        sol = direct_solve(DirectProblem(_box(2.0, h, 0.8), OMEGA, UniformMedium(1, 1), point_source=(0.0, 0.0)))
        vals.append(np.array([sol.interpolate([p], [0.5 * p])[0, 0] for p in pts]))
    exact = 0.25j * special.hankel1(0, OMEGA * pts * math.sqrt(1.25))
    err = np.abs(richardson(*vals) - exact).max() / np.abs(exact).max()
    assert err < 1e-2


def test_point_sources_are_reciprocal():
    # symmetric operator: exchanging source and receiver at cell centres leaves the value unchanged
    g = _box(1.5, 1 / 20, 0.5)
    med = EffectiveLayeredMedium(1.0, 1.0, np.diag([0.8, 0.5]), 2.0)
    a, b = (g.x1[10], g.x2[12]), (g.x1[40], g.x2[45])
    ua = direct_solve(DirectProblem(g, OMEGA, med, point_source=a))
    ub = direct_solve(DirectProblem(g, OMEGA, med, point_source=b))
    assert abs(ua.u[40, 45] - ub.u[10, 12]) < 1e-10 * abs(ua.u[40, 45])


def test_point_source_below_interface_matches_layered_green():
    A = np.diag([0.8, 0.5])
    medium = LayeredMedium(1.0, 1.0, A, 2.0, TC.zero(OMEGA), OMEGA)
    src = (0.0, -0.5)
    rec = [(0.3, 0.5), (-0.4, 0.8), (0.5, -0.9)]
    vals = []
    for h in (1 / 20, 1 / 40):
        sol = direct_solve(DirectProblem(_box(2.5, h, 0.8), OMEGA, EffectiveLayeredMedium(1.0, 1.0, A, 2.0),
                                         point_source=src))
        vals.append(np.array([sol.interpolate([x], [y])[0, 0] for x, y in rec]))
    exact = np.array([green(np.array(r), np.array(src), medium, 1e-10).value for r in rec])
    assert np.abs(richardson(*vals) - exact).max() < 1e-2 * np.abs(exact).max()


# --- Bloch column with impedance conditions -----------------------------------------------------

def _flat_column(h, coeffs, A=np.array([[0.7, 0.1], [0.1, 0.45]]), eps=2.0):
    medium = LayeredMedium(1.0, 1.0, A, eps, coeffs, OMEGA)
    wave = IncidentWave.from_angle(OMEGA, math.radians(20))
    bg = background_field(wave, medium)
    width = 8 * h
    grid = Grid(np.linspace(0, width, 9), uniform_edges(-2.0, 2.0, h), PML((0, 0, 0.8, 0.8), OMEGA),
                bloch=np.exp(1j * bg.k1 * width), interface=True)
    sol = direct_solve(DirectProblem(grid, OMEGA, EffectiveLayeredMedium(1.0, 1.0, A, eps), UniformMedium(1, 1),
                                     plane_wave_reference(OMEGA, wave.theta), coeffs=coeffs,
                                     reference_coeffs=TC.zero(OMEGA), k_plus=OMEGA))
    X1, X2 = np.meshgrid(grid.x1, grid.x2, indexing="ij")
    win = (np.abs(X2) < 1.1) & (np.abs(X2) > 0.1)
    return compare_fields(bg.value(X1, X2)[win], sol.u[win]).relative_l2


COEFFS = TC(0.1, [0.01, 0.03], [0.02, -0.01], [0.0, 0.02], 0.05, 0.05, OMEGA)


@pytest.mark.parametrize("coeffs", [TC.zero(OMEGA, s=0.1), COEFFS])
def test_bloch_column_matches_background_and_converges(coeffs):
    errs = [_flat_column(h, coeffs) for h in (1 / 40, 1 / 80)]
    # second order: halving h divides the error by four
    assert errs[1] < 1e-2
    assert errs[0] / errs[1] > 3.5


def test_layered_reference_is_exact_for_its_own_problem():
    A = np.diag([0.8, 0.5])
    medium = LayeredMedium(1.0, 1.0, A, 2.0, TC.zero(OMEGA), OMEGA)
    bg = background_field(IncidentWave.from_angle(OMEGA, 0.3), medium)
    g = _box(1.0, 1 / 20, 0.4)
    med = EffectiveLayeredMedium(1.0, 1.0, A, 2.0)
    sol = direct_solve(DirectProblem(g, OMEGA, med, med, layered_reference(bg)))
    assert np.abs(sol.w).max() < 1e-12


def test_flux_sign_of_phi3_beats_printed_sign():
    m = validation.acceptance_materials()
    eff = homogenize(validation.acceptance_cell(), m, (128, 128))
    prof = validation.acceptance_profile(1 / 20)
    strip = solve_strip(prof, m, eff.A)
    wave = validation.acceptance_wave()
    errs = {}
    for sign in ("flux", "printed"):
        c = layer_coefficients(strip, prof, m, eff.A, omega=OMEGA, phi3_sign=sign)
        bg = background_field(wave, LayeredMedium.build(m, eff, c, OMEGA))
        grid = validation._column_grid(prof.xi, 32, prof.xi * prof.max_value(), bg.k1)
        ms = MultiscaleMedium(m, prof, validation.acceptance_cell(), validation.MICRO_BUFFER, eff.A, eff.eps_minus)
        sol = direct_solve(DirectProblem(grid, OMEGA, ms, UniformMedium(m.mu_plus, m.eps_plus),
                                         plane_wave_reference(OMEGA, wave.theta)))
        X1, X2 = np.meshgrid(grid.x1, grid.x2, indexing="ij")
        errs[sign] = validation._window_error(sol.u, bg.value(X1, X2), grid)
    assert errs["flux"] < errs["printed"]


# --- failure paths -------------------------------------------------------------------------------

def _tiny_problem():
    return DirectProblem(_box(1.0, 1 / 20, 0.4), OMEGA, UniformMedium(1, 1), point_source=(0.01, 0.02))


def test_factor_too_large_is_reported(monkeypatch):
    monkeypatch.setattr(fdfd, "_available_bytes", lambda: 1.0)
    with pytest.raises(fdfd.FactorTooLarge):
        direct_solve(_tiny_problem())


def test_residual_check_raises(monkeypatch):
    monkeypatch.setattr(fdfd, "RESIDUAL_LIMIT", -1.0)
    with pytest.raises(ResidualTooHigh):
        direct_solve(_tiny_problem())


def test_resolution_check():
    p = _tiny_problem()
    p.check_resolution = {"k_max": 4 * OMEGA}
    with pytest.raises(ValueError):
        direct_solve(p)


def test_point_source_outside_grid():
    p = _tiny_problem()
    p.point_source = (5.0, 0.0)
    with pytest.raises(ValueError):
        direct_solve(p)
