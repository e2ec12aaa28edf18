import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from camoscat import oracles
from camoscat.errors import SingularInterfaceSystem
from camoscat.homogenization import EffectiveMedium
from camoscat.layered import (LayeredMedium, anisotropic_freespace_green, anomaly_green, background_field,
                              beta_plus, default_contour, dispersion_root, freespace_green, green, interface_determinant, lower_roots,
                              sommerfeld_rule, spectral_green)
from camoscat.model import IncidentWave, MaterialSet
from camoscat.strip import TransmissionCoefficients as TC

OMEGA = 2 * math.pi
A_ANISO = np.array([[0.7, 0.1], [0.1, 0.45]])
COEFFS = TC(0.1, [0.01, 0.03], [0.02, -0.01], [0.0, 0.02], 0.05, 0.05, OMEGA)


def _medium(A=A_ANISO, eps=2.0, coeffs=None):
    coeffs = coeffs if coeffs is not None else TC.zero(OMEGA, s=float(np.asarray(A)[1, 0]))
    return LayeredMedium(1.0, 1.0, A, eps, coeffs, OMEGA)


MATCHED = LayeredMedium(1.0, 1.0, np.eye(2), 1.0, TC.zero(OMEGA), OMEGA)


# --- dispersion -------------------------------------------------------------------------

def test_normal_incidence_root_points_down():
    mu, eps = 2.0, 3.0
    b = dispersion_root(0.0, EffectiveMedium.isotropic(mu, eps), OMEGA)
    assert b == pytest.approx(-OMEGA * math.sqrt(eps * mu), rel=1e-14)


def test_evanescent_root_decays_downwards():
    mu, eps = 2.0, 3.0
    k1 = 1.5 * OMEGA * math.sqrt(eps * mu)
    b = dispersion_root(k1, EffectiveMedium.isotropic(mu, eps), OMEGA)
    assert abs(b.real) < 1e-12 and b.imag < 0


@pytest.mark.parametrize("k1", [0.0, 2.0, 5.0])
def test_diagonal_tensor_root_matches_quadratic_formula(k1):
    a1, a2, eps = 0.8, 0.4, 2.0
    b = dispersion_root(k1, EffectiveMedium(np.diag([a1, a2]), eps), OMEGA)
    assert b == pytest.approx(-math.sqrt((OMEGA**2 * eps - a1 * k1**2) / a2), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.floats(-12.0, 12.0))
def test_root_solves_dispersion_and_carries_energy_down(k1):
    m = _medium()
    b = complex(dispersion_root(k1, m))
    A = m.A
    poly = A[1, 1] * b * b + (A[0, 1] + A[1, 0]) * k1 * b + A[0, 0] * k1 * k1 - OMEGA**2 * m.eps_minus
    assert abs(poly) < 1e-10 * OMEGA**2 * m.eps_minus
    if abs(b.imag) > 1e-12:
        assert b.imag < 0
    else:
        assert A[1, 0] * k1 + A[1, 1] * b.real < 0


# --- background field ----------------------------------------------------------------------

def test_no_interface_means_no_reflection():
    bg = background_field(IncidentWave.from_angle(OMEGA, 0.4), MATCHED)
    assert abs(bg.R) < 1e-15 and abs(bg.T - 1) < 1e-15


@pytest.mark.parametrize("mu_d, eps_d", [(2.0, 3.0), (0.5, 1.5)])
@pytest.mark.parametrize("deg", [0.0, 35.0, 70.0])
def test_fresnel_reflection_and_energy(mu_d, eps_d, deg):
    m = _medium(np.eye(2) / mu_d, eps_d)
    bg = background_field(IncidentWave.from_angle(OMEGA, math.radians(deg)), m)
    assert abs(bg.R - oracles.fresnel_reflection(bg.k1, OMEGA, 1, 1, mu_d, eps_d)) < 1e-12
    inc, ref, tr = bg.energy_fluxes()
    assert abs(inc + ref - tr) < 1e-10 * abs(inc)


def test_background_residuals_and_bulk_equations():
    m = _medium(coeffs=COEFFS)
    bg = background_field(IncidentWave.from_angle(OMEGA, 0.5), m)
    assert max(bg.residuals) < 1e-12
    # plane-wave symbols satisfy both bulk equations
    assert abs(bg.k1**2 + bg.beta_plus**2 - OMEGA**2) < 1e-10
    A, b = m.A, bg.beta_minus
    assert abs(A[0, 0] * bg.k1**2 + 2 * m.a_sym * bg.k1 * b + A[1, 1] * b * b - OMEGA**2 * m.eps_minus) < 1e-9


def test_background_gradient_matches_finite_differences():
    bg = background_field(IncidentWave.from_angle(OMEGA, 0.5), _medium(coeffs=COEFFS))
    h = 1e-6
    for x in ((0.2, 0.4), (0.3, -0.6)):
        g = bg.gradient(*x)
        fd = [(bg.value(x[0] + h, x[1]) - bg.value(x[0] - h, x[1])) / (2 * h),
              (bg.value(x[0], x[1] + h) - bg.value(x[0], x[1] - h)) / (2 * h)]
        np.testing.assert_allclose(g, fd, rtol=1e-7)


def test_singular_interface_system_raises():
    # the determinant is affine in phi3, so two evaluations locate its zero
    m = _medium(np.eye(2), 1.0)
    theta = 0.3
    k1 = OMEGA * math.sin(theta)

    def det(phi3):
        return complex(interface_determinant(k1, m.with_coeffs(TC(0.0, [0, 0], [0, 0], [0, 0], phi3, 0.05, OMEGA))))

    d0, d1 = det(0.0), det(1.0)
    root = -d0 / (d1 - d0)
    assert abs(det(root)) < 1e-12
    c = TC(0.0, [0, 0], [0, 0], [0, 0], root, 0.05, OMEGA)
    with pytest.raises(SingularInterfaceSystem):
        background_field(IncidentWave.from_angle(OMEGA, theta), m.with_coeffs(c))


# --- spectral kernel -------------------------------------------------------------------------

@pytest.mark.parametrize("k1", [0.5, 4.0, 9.0])
def test_spectral_kernel_without_interface(k1):
    for x2, y2 in ((0.3, -0.4), (-0.2, -0.5), (0.6, 0.1)):
        b = complex(beta_plus(k1, MATCHED))
        exact = 1j * np.exp(1j * b * abs(x2 - y2)) / (2 * b)
        assert abs(spectral_green(k1, x2, y2, MATCHED) - exact) < 1e-13 * abs(exact) + 1e-300


def test_spectral_kernel_decays_evanescently():
    m = _medium(coeffs=COEFFS)
    x2, y2 = 0.3, -0.2
    k1 = 20 / abs(x2 - y2)
    assert abs(spectral_green(k1, x2, y2, m)) < 10 * math.exp(-k1 * abs(x2 - y2))


def test_spectral_reciprocity_without_layer():
    rng = np.random.default_rng(3)
    m = _medium()
    for _ in range(10):
        k1 = rng.uniform(-12, 12)
        a, b = rng.uniform(-1, 1, 2)
        if a * b == 0:
            continue
        assert abs(spectral_green(k1, a, b, m) - spectral_green(-k1, b, a, m)) < 1e-12


def test_spectral_reciprocity_is_broken_by_layer_terms():
    m = _medium(coeffs=COEFFS)
    assert abs(spectral_green(2.0, 0.3, -0.5, m) - spectral_green(-2.0, -0.5, 0.3, m)) > 1e-6


# --- spatial Green's function ------------------------------------------------------------------

def test_contour_is_branch_continuous():
    m = _medium(coeffs=COEFFS)
    c = default_contour(m)
    t = np.linspace(-3 * c.K, 3 * c.K, 20001)
    k1, _ = c(t)
    for vals in (beta_plus(k1, m), lower_roots(k1, m)[0]):
        jumps = np.abs(np.diff(vals))
        assert jumps.max() < 50 * np.median(jumps)


def test_hankel_degeneration():
    rng = np.random.default_rng(0)
    for _ in range(5):
        x, y = rng.uniform(-1, 1, (2, 2))
        ref = 0.25j * special.hankel1(0, OMEGA * np.hypot(*(x - y)))
        assert abs(green(x, y, MATCHED, tol=1e-11).value - ref) < 1e-10 * abs(ref)


def test_reciprocity_across_interface():
    rng = np.random.default_rng(1)
    m = _medium()
    for _ in range(5):
        x = np.array([rng.uniform(-1, 1), rng.uniform(0.05, 1)])
        y = np.array([rng.uniform(-1, 1), rng.uniform(-1, -0.05)])
        a, b = green(x, y, m, 1e-11).value, green(y, x, m, 1e-11).value
        assert abs(a - b) < 1e-8 * abs(a)


@pytest.mark.parametrize("x, y", [((0.3, 0.4), (0, -0.5)), ((0.3, -0.2), (0, -0.5)), ((0.3, -0.4), (0, 0.2))])
def test_gradient_matches_finite_differences(x, y):
    m = _medium(coeffs=COEFFS)
    x, y = np.array(x), np.array(y)
    h = 1e-4
    g = green(x, y, m, 1e-11).gradient
    fd = np.array([(green(x + h * e, y, m, 1e-12).value - green(x - h * e, y, m, 1e-12).value) / (2 * h)
                   for e in np.eye(2)])
    assert np.abs(g - fd).max() < 1e-6 * np.abs(fd).max()


def test_loose_and_tight_tolerances_agree():
    m = _medium(coeffs=COEFFS)
    x, y = np.array([0.4, 0.7]), np.array([-0.1, -0.8])
    assert abs(green(x, y, m, 1e-6).value - green(x, y, m, 1e-10).value) < 1e-6


def test_green_rejects_coincident_points():
    with pytest.raises(ValueError):
        green((0.1, -0.2), (0.1, -0.2), MATCHED)


@pytest.mark.parametrize("tgt", [[[0.5, -0.4], [0.6, 0.5]], [[0.5, -0.4], [-0.6, -0.3]]])
def test_fixed_rule_matches_adaptive_quadrature(tgt):
    m = _medium(coeffs=COEFFS)
    src = np.array([[0.0, 0.2, -0.3], [-1.0, -1.3, -0.8]])
    tgt = np.array(tgt)
    M = sommerfeld_rule(m, tgt, src, tol=1e-11).matrix(tgt, src)
    for i in range(tgt.shape[1]):
        for j in range(src.shape[1]):
            x, y = tgt[:, i], src[:, j]
            g = green(x, y, m, 1e-12).value
            if x[1] < 0:
                g = g - freespace_green(x, y, m.A, m.eps_minus, OMEGA)
            assert abs(M[i, j] - g) < 1e-9


# --- closed-form kernels -------------------------------------------------------------------------

def test_anomaly_green_definition():
    m = MaterialSet(1, 1, 1, 1, 1, 1, 1, 1, 1.0, 1.0)
    assert anomaly_green((1.3, 0.0), (0.0, 0.0), m, 1.0) == pytest.approx(0.25j * special.hankel1(0, 1.3))


def _stencil_residual(G, A, eps, omega, center, h=1e-3):
    """``div(A grad G) + omega^2 eps G`` by central differences at ``center``."""
    c = np.asarray(center, float)
    e1, e2 = np.eye(2) * h
    d11 = (G(c + e1) - 2 * G(c) + G(c - e1)) / h**2
    d22 = (G(c + e2) - 2 * G(c) + G(c - e2)) / h**2
    d12 = (G(c + e1 + e2) - G(c + e1 - e2) - G(c - e1 + e2) + G(c - e1 - e2)) / (4 * h * h)
    lap = A[0, 0] * d11 + (A[0, 1] + A[1, 0]) * d12 + A[1, 1] * d22
    return abs(lap + omega**2 * eps * G(c)) / abs(omega**2 * eps * G(c))


def test_anomaly_green_solves_helmholtz():
    m = MaterialSet(1, 1, 1, 1, 1, 1, 1, 1, 2.0, 3.0)
    G = lambda x: anomaly_green(x, (0.0, 0.0), m, 1.0)  # noqa: E731
    assert _stencil_residual(G, np.eye(2) / 2.0, 3.0, 1.0, (1.0, 0.0)) < 1e-5


def test_anisotropic_green_solves_its_equation():
    eff = EffectiveMedium(A_ANISO, 2.0)
    G = lambda x: anisotropic_freespace_green(x, (0.0, 0.0), eff, 1.0)  # noqa: E731
    assert _stencil_residual(G, A_ANISO, 2.0, 1.0, (0.6, 0.8)) < 1e-5


def test_isotropic_reduction_and_symmetry():
    mu, eps = 2.0, 3.0
    x, y = np.array([0.3, -0.2]), np.array([-0.4, 0.5])
    g = freespace_green(x, y, np.eye(2) / mu, eps, OMEGA)
    assert g == pytest.approx(0.25j * mu * special.hankel1(0, OMEGA * math.sqrt(eps * mu) * np.hypot(*(x - y))))
    eff = EffectiveMedium(A_ANISO, eps)
    assert anisotropic_freespace_green(x, y, eff, OMEGA) == anisotropic_freespace_green(y, x, eff, OMEGA)


def test_near_singular_warning_is_a_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        spectral_green(1.0, 0.3, -0.4, _medium(coeffs=COEFFS))
