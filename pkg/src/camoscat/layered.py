"""Plane-wave solution and Green's function of the effective two-half-space
problem.

Upper half-space ``x2 > 0``: ``(1/mu_plus) Lap U + omega^2 eps_plus U = 0``.
Lower half-space: ``div(A grad U) + omega^2 eps_minus U = 0``.  At
``x2 = 0`` the trace jumps by ``psi . grad U+`` and the conormal flux jumps
by the generalised impedance terms built from ``phi1, phi2, phi3``.

Everything is done mode by mode for ``exp(i k1 x1 + i beta x2)``.  The
Green's function solves ``operator(G) = -delta_y`` and is recovered by a
Sommerfeld integral over a contour pushed below the real axis for
``Re k1 > 0`` and above it for ``Re k1 < 0`` (outgoing radiation).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DegenerateDispersion, QuadratureFailure, SingularInterfaceSystem
from .homogenization import EffectiveMedium
from .model import IncidentWave, MaterialSet
from .quadrature import adaptive_gk15, panel_rule
from .strip import TransmissionCoefficients

NEAR_SINGULAR = 1e-10


@dataclass(frozen=True)
class LayeredMedium:
    """Upper medium, effective lower medium and interface coefficients at one frequency."""

    mu_plus: float
    eps_plus: float
    A: np.ndarray
    eps_minus: float
    coeffs: TransmissionCoefficients
    omega: float

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float).reshape(2, 2)
        object.__setattr__(self, "A", A)
        if A[1, 1] == 0.0:
            raise DegenerateDispersion("A22 vanishes")
        if np.min(np.linalg.eigvalsh(0.5 * (A + A.T))) <= 0:
            raise ValueError("effective tensor must be positive definite")

    @classmethod
    def build(cls, materials: MaterialSet, effective: EffectiveMedium, coeffs=None, omega=None):
        if coeffs is None:
            coeffs = TransmissionCoefficients.zero(omega, s=float(effective.A[1, 0]))
        omega = coeffs.omega if omega is None else omega
        return cls(materials.mu_plus, materials.eps_plus, effective.A, effective.eps_minus, coeffs, omega)

    @property
    def k_plus(self):
        return self.omega * math.sqrt(self.eps_plus * self.mu_plus)

    @property
    def a_sym(self):
        return 0.5 * (self.A[0, 1] + self.A[1, 0])

    @property
    def det_sym(self):
        return self.A[0, 0] * self.A[1, 1] - self.a_sym**2

    @property
    def kappa_minus(self):
        """Largest tangential wavenumber that still propagates below."""
        return self.omega * math.sqrt(self.A[1, 1] * self.eps_minus / self.det_sym)

    @property
    def k_max(self):
        return max(self.k_plus, self.kappa_minus)

    def with_coeffs(self, coeffs):
        return LayeredMedium(self.mu_plus, self.eps_plus, self.A, self.eps_minus, coeffs, self.omega)


# --- dispersion ---------------------------------------------------------------

def beta_plus(k1, medium: LayeredMedium):
    """Vertical wavenumber above the interface, principal root (Im >= 0 on
    the real axis and continuous along the deformed contour)."""
    k1 = np.asarray(k1, dtype=complex)
    return np.sqrt(medium.k_plus**2 - k1 * k1)


def lower_roots(k1, medium: LayeredMedium):
    """``(beta_down, beta_up)`` roots of
    ``A22 b^2 + (A12 + A21) k1 b + A11 k1^2 - omega^2 eps_minus = 0``.

    ``beta_down`` carries energy downwards (or decays as ``x2 -> -inf``).
    """
    k1 = np.asarray(k1, dtype=complex)
    A22 = medium.A[1, 1]
    root = math.sqrt(medium.det_sym) * np.sqrt(medium.kappa_minus**2 - k1 * k1)
    base = -medium.a_sym * k1
    return (base - root) / A22, (base + root) / A22


def dispersion_root(k1, medium, omega=None):
    """Outgoing lower-medium vertical wavenumber.

    ``medium`` may be a :class:`LayeredMedium` or an :class:`EffectiveMedium`
    (then ``omega`` is required).  For real ``k1`` the root has ``Im < 0``
    when evanescent, and otherwise the conormal flux
    ``A21 k1 + A22 beta`` is negative (energy travels downwards).
    """
    if isinstance(medium, EffectiveMedium):
        if omega is None:
            raise ValueError("omega is required with an EffectiveMedium")
        medium = LayeredMedium(1.0, 1.0, medium.A, medium.eps_minus,
                               TransmissionCoefficients.zero(omega), omega)
    return lower_roots(k1, medium)[0]


# --- interface symbols -----------------------------------------------------------

def jump_symbol(k1, b, coeffs: TransmissionCoefficients):
    """``1 - psi . (i k1, i b)``: trace of an upper mode minus its jump."""
    return 1.0 - 1j * (coeffs.psi[0] * k1 + coeffs.psi[1] * b)


def impedance_symbol(k1, b, coeffs: TransmissionCoefficients, k_plus):
    """Right-hand side of the flux condition for an upper mode, per unit amplitude.

    ``d1 grad U -> (-k1^2, -k1 b)``; the second pairing
    ``(d21 U, (-k+^2 - d11) U) -> (-k1 b, k1^2 - k+^2)``.
    """
    p1, p2 = coeffs.phi1, coeffs.phi2
    return (p1[0] * (-k1 * k1) + p1[1] * (-k1 * b)
            + p2[0] * (-k1 * b) + p2[1] * (k1 * k1 - k_plus**2) + coeffs.phi3)


def upper_flux_symbol(k1, b, medium: LayeredMedium):
    """Upper conormal flux minus the impedance terms, per unit amplitude."""
    return 1j * b / medium.mu_plus - impedance_symbol(k1, b, medium.coeffs, medium.k_plus)


def lower_flux_symbol(k1, b, medium: LayeredMedium):
    """``(0, 1) A grad`` of a lower mode per unit amplitude."""
    return 1j * (medium.A[1, 0] * k1 + medium.A[1, 1] * b)


def interface_determinant(k1, medium: LayeredMedium):
    """``Delta(k1)``: vanishes where the interface system is singular."""
    bp = beta_plus(k1, medium)
    bd, _ = lower_roots(k1, medium)
    return (upper_flux_symbol(k1, bp, medium)
            - lower_flux_symbol(k1, bd, medium) * jump_symbol(k1, bp, medium.coeffs))


# --- plane-wave background ----------------------------------------------------------

@dataclass(frozen=True)
class BackgroundField:
    medium: LayeredMedium
    k1: float
    beta_inc: complex
    beta_plus: complex
    beta_minus: complex
    R: complex
    T: complex
    residuals: tuple
    amplitude: complex = 1.0

    def _modes(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        ph = np.exp(1j * self.k1 * x1)
        up = x2 >= 0
        inc = np.exp(1j * self.beta_inc * x2)
        ref = self.R * np.exp(1j * self.beta_plus * np.where(up, x2, 0.0))
        tr = self.T * np.exp(1j * self.beta_minus * np.where(up, 0.0, x2))
        return ph, up, inc, ref, tr

    def value(self, x1, x2):
        ph, up, inc, ref, tr = self._modes(x1, x2)
        return self.amplitude * ph * np.where(up, inc + ref, tr)

    def gradient(self, x1, x2):
        ph, up, inc, ref, tr = self._modes(x1, x2)
        u = np.where(up, inc + ref, tr)
        d2 = np.where(up, 1j * (self.beta_inc * inc + self.beta_plus * ref), 1j * self.beta_minus * tr)
        return self.amplitude * np.stack([1j * self.k1 * ph * u, ph * d2])

    def energy_fluxes(self):
        """Vertical conormal fluxes ``(incident, reflected, transmitted)`` at the interface."""
        m = self.medium
        inc = (self.beta_inc / m.mu_plus).real
        ref = (self.beta_plus / m.mu_plus).real * abs(self.R) ** 2
        tr = (m.A[1, 0] * self.k1 + m.A[1, 1] * self.beta_minus).real * abs(self.T) ** 2
        return inc, ref, tr

    def scaled(self, amplitude):
        return BackgroundField(self.medium, self.k1, self.beta_inc, self.beta_plus, self.beta_minus,
                               self.R, self.T, self.residuals, amplitude)

    def to_dict(self):
        c = lambda z: [complex(z).real, complex(z).imag]
        return {"k1": self.k1, "beta_inc": c(self.beta_inc), "beta_plus": c(self.beta_plus),
                "beta_minus": c(self.beta_minus), "R": c(self.R), "T": c(self.T),
                "residuals": list(self.residuals)}


def background_field(wave: IncidentWave, medium: LayeredMedium) -> BackgroundField:
    """Reflected and transmitted plane waves for incidence ``exp(i k+ theta . x)``."""
    kp = medium.k_plus
    k1 = kp * wave.theta[0]
    b_inc = kp * wave.theta[1]
    bp = complex(beta_plus(k1, medium))
    bd = complex(lower_roots(k1, medium)[0])
    c = medium.coeffs
    M = np.array([[jump_symbol(k1, bp, c), -1.0],
                  [upper_flux_symbol(k1, bp, medium), -lower_flux_symbol(k1, bd, medium)]], dtype=complex)
    rhs = -np.array([jump_symbol(k1, b_inc, c), upper_flux_symbol(k1, b_inc, medium)], dtype=complex)
    scale = np.abs(M).max(axis=1).prod()
    if abs(np.linalg.det(M)) < 1e-14 * scale:
        raise SingularInterfaceSystem("interface system is singular for this incidence")
    R, T = np.linalg.solve(M, rhs)
    r = M @ np.array([R, T]) - rhs
    res = tuple(float(abs(r[i]) / max(abs(rhs[i]), np.abs(M[i]).max())) for i in range(2))
    return BackgroundField(medium, k1, b_inc, bp, bd, complex(R), complex(T), res)


# --- spectral Green's function ----------------------------------------------------------

def _spectral_parts(k1, x2, y2, medium: LayeredMedium):
    """Coefficients of the non-singular spectral part.

    Returns ``(C, a, b)`` with part ``= C exp(i (a x2 + b y2))`` and, when
    ``x`` and ``y`` are on the same side, the free-space part separately via
    :func:`_spectral_free`.
    """
    c = medium.coeffs
    kp = medium.k_plus
    bp = beta_plus(k1, medium)
    bd, bu = lower_roots(k1, medium)
    Qd = lower_flux_symbol(k1, bd, medium)
    Jp = jump_symbol(k1, bp, c)
    Fp = upper_flux_symbol(k1, bp, medium)
    delta = Fp - Qd * Jp
    _warn_near_singular(delta, Fp)
    if y2 < 0:
        if x2 >= 0:
            return -1.0 / delta, bp, -bu
        C0 = 1j / (medium.A[1, 1] * (bu - bd))
        return -Jp / delta - C0, bd, -bu
    Cp = 1j * medium.mu_plus / (2 * bp)
    Jm = jump_symbol(k1, -bp, c)
    Fm = upper_flux_symbol(k1, -bp, medium)
    delta_m = Fm - Qd * Jm
    if x2 >= 0:
        return -Cp * delta_m / delta, bp, bp
    return Cp * (Jm * Fp - Jp * Fm) / delta, bd, bp


def _warn_near_singular(delta, scale):
    d = np.abs(np.atleast_1d(delta))
    s = np.maximum(np.abs(np.atleast_1d(scale)), 1e-300)
    if np.any(d < NEAR_SINGULAR * s):
        warnings.warn("interface system nearly singular at some k1", RuntimeWarning, stacklevel=3)


def _spectral_free(k1, x2, y2, medium: LayeredMedium):
    if y2 < 0:
        bd, bu = lower_roots(k1, medium)
        C0 = 1j / (medium.A[1, 1] * (bu - bd))
        b = bu if x2 > y2 else bd
        return C0 * np.exp(1j * b * (x2 - y2))
    bp = beta_plus(k1, medium)
    return 1j * medium.mu_plus / (2 * bp) * np.exp(1j * bp * abs(x2 - y2))


def _same_side(x2, y2):
    return (x2 >= 0) == (y2 >= 0)


def spectral_green(k1, x2, y2, medium: LayeredMedium):
    """``G_hat(k1; x2, y2)``: 1D Green's function of the tangential Fourier mode ``k1``."""
    if x2 == 0.0 and y2 == 0.0:
        raise ValueError("source and target both on the interface")
    k1 = np.asarray(k1, dtype=complex)
    C, a, b = _spectral_parts(k1, x2, y2, medium)
    out = C * np.exp(1j * (a * x2 + b * y2))
    if _same_side(x2, y2):
        out = out + _spectral_free(k1, x2, y2, medium)
    return out


# --- closed-form whole-space kernels ------------------------------------------------

def freespace_green(x, y, A, eps, omega, grad=False):
    """Whole-space Green's function of ``div(A grad) + omega^2 eps`` (``-delta`` source).

    ``(i/4) det(A)^(-1/2) H0(omega sqrt(eps) |A^(-1/2)(x - y)|)``.  With
    ``grad=True`` also returns ``A grad_x G`` (the conormal vector field).
    """
    A = np.asarray(A, dtype=float)
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    Ainv = np.linalg.inv(A)
    rho = np.sqrt(np.einsum("i...,ij,j...->...", d, Ainv, d))
    k = omega * math.sqrt(eps)
    c0 = 1.0 / math.sqrt(np.linalg.det(A))
    g = 0.25j * c0 * special.hankel1(0, k * rho)
    if not grad:
        return g
    # A grad_x G = -(i k c0 / 4) H1(k rho) (x - y) / rho
    flux = -0.25j * k * c0 * special.hankel1(1, k * rho) / rho * d
    return g, flux


def anisotropic_freespace_green(x, y, medium: EffectiveMedium, omega, grad=False):
    return freespace_green(x, y, medium.A, medium.eps_minus, omega, grad=grad)


def anomaly_green(x, y, materials: MaterialSet, omega, grad=False):
    """``(i mu_D / 4) H0(k_D |x - y|)``."""
    return freespace_green(x, y, np.eye(2) / materials.mu_D, materials.eps_D, omega, grad=grad)


# --- contour ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Contour:
    """``k1(t) = t - i h s(t)``; ``s`` is a sine bump on ``[-K, K]`` and ``sign(t)`` beyond."""

    K: float
    height: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        s = np.where(np.abs(t) <= self.K, np.sin(0.5 * np.pi * np.clip(t / self.K, -1, 1)), np.sign(t))
        ds = np.where(np.abs(t) <= self.K, 0.5 * np.pi / self.K * np.cos(0.5 * np.pi * t / self.K), 0.0)
        return t - 1j * self.height * s, 1.0 - 1j * self.height * ds


def default_contour(medium: LayeredMedium, x_span=0.0):
    """Bump over ``[-1.2 k_max, 1.2 k_max]`` of height ``0.4 min(k+, kappa-)``,
    lowered so that ``height * |x1 - y1| <= 1`` to keep ``exp(i k1 X)`` bounded."""
    K = 1.2 * medium.k_max
    h = 0.4 * min(medium.k_plus, medium.kappa_minus)
    if x_span > 0:
        h = min(h, 1.0 / x_span)
    return Contour(K, h)


@dataclass(frozen=True)
class GreenEvaluation:
    value: complex
    gradient: np.ndarray
    error: float
    panels: int = 0


def _tail_extent(expo, contour, tol, sign):
    """Truncation point where the exponential factor falls below ``tol``."""
    T0 = contour.K + 1.0
    e0 = expo(np.array([sign * T0]))[0]
    e1 = expo(np.array([sign * 2 * T0]))[0]
    rate = -(e1 - e0) / T0
    if rate <= 1e-12:
        raise QuadratureFailure("Sommerfeld integrand does not decay (points on the interface?)")
    T = T0 + max(0.0, (e0 - math.log(tol) + 8.0) / rate)
    return T, rate


def _exponent_fn(X, x2, y2, medium, contour):
    def expo(t):
        k1, _ = contour(t)
        _, a, b = _spectral_parts(k1, x2, y2, medium)
        return (-(k1 * X + a * x2 + b * y2).imag)
    return expo


def green(x, y, medium: LayeredMedium, tol=1e-10, raise_on_failure=True) -> GreenEvaluation:
    """Layered-medium Green's function and its ``x``-gradient.

    Same-side pairs split off the closed-form whole-space kernel; the rest
    is a Sommerfeld integral on the deformed contour with adaptive
    Gauss-Kronrod panels and an exponential tail cut.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.allclose(x, y, rtol=0, atol=0):
        raise ValueError("x and y coincide")
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    X = x[0] - y[0]
    x2, y2 = float(x[1]), float(y[1])
    contour = default_contour(medium, abs(X))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        expo = _exponent_fn(X, x2, y2, medium, contour)
        T_right, _ = _tail_extent(expo, contour, tol, +1)
        T_left, _ = _tail_extent(expo, contour, tol, -1)
    kp = medium.k_plus

    def integrand(t):
        k1, dk = contour(t)
        C, a, b = _spectral_parts(k1, x2, y2, medium)
        f = C * np.exp(1j * (k1 * X + a * x2 + b * y2)) * dk / (2 * np.pi)
        return np.column_stack([f, 1j * k1 * f, 1j * a * f])

    breaks = _breakpoints(contour, -T_left, T_right, abs(X), medium)
    tol_vec = np.array([tol, tol * max(1.0, kp), tol * max(1.0, kp)])
    try:
        val, err, panels = adaptive_gk15(integrand, breaks, tol_vec)
    except QuadratureFailure as exc:
        if raise_on_failure:
            raise
        val, err, panels = np.asarray(exc.value), np.asarray(exc.error), ()
    value, grad = val[0], val[1:].copy()
    if _same_side(x2, y2):
        if y2 < 0:
            g, flux = freespace_green(x, y, medium.A, medium.eps_minus, medium.omega, grad=True)
            gx = np.linalg.solve(medium.A, flux)
        else:
            A_up = np.eye(2) / medium.mu_plus
            g, flux = freespace_green(x, y, A_up, medium.eps_plus, medium.omega, grad=True)
            gx = medium.mu_plus * flux
        value = value + g
        grad = grad + gx
    return GreenEvaluation(complex(value), grad, float(err[0]), len(panels))


def _breakpoints(contour, a, b, X, medium):
    """Initial panel edges: bump ends, branch points, and a width that
    resolves the oscillation ``exp(i k1 X)``."""
    pts = {a, b, -contour.K, contour.K, 0.0, medium.k_plus, -medium.k_plus,
           medium.kappa_minus, -medium.kappa_minus}
    pts = np.array(sorted(p for p in pts if a <= p <= b))
    width = min(0.25 * medium.k_max, math.pi / max(X, 1e-12))
    out = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(1, int(math.ceil((hi - lo) / width)))
        out.extend(np.linspace(lo, hi, n + 1)[1:])
    return np.array(out)


# --- fixed rules for many pairs (separable evaluation) -------------------------------

@dataclass
class SommerfeldRule:
    """A fixed quadrature rule in ``k1`` valid for a family of point pairs.

    The non-singular part factorises:
    ``G(x, y) = sum_q w_q C_q e^{i k_q (x1 - c)} e^{i a_q x2} e^{-i k_q (y1 - c)} e^{i b_q y2}``.
    """

    k1: np.ndarray
    wk: np.ndarray       # Kronrod weights times dk/dt / 2 pi
    wg: np.ndarray       # embedded Gauss weights (error estimate)
    C: np.ndarray
    a: np.ndarray
    b: np.ndarray
    center: float
    target_side: int
    source_side: int
    panels: int = 0
    info: dict = field(default_factory=dict)

    def factors(self, x, side):
        x = np.asarray(x, dtype=float).reshape(2, -1)
        ex = np.exp(1j * np.outer(x[0] - self.center, self.k1))
        if side == "target":
            return ex * np.exp(1j * np.outer(x[1], self.a))
        return np.conj(np.exp(1j * np.outer(x[0] - self.center, np.conj(self.k1)))) * np.exp(1j * np.outer(x[1], self.b))

    def matrix(self, targets, sources, conormal=None, gauss=False):
        """Non-singular part for all target/source pairs.

        With ``conormal`` (a ``(2, n_targets)`` array of vectors ``A^T nu``)
        returns the matrix of ``conormal . grad_x`` instead.
        """
        Ex = self.factors(targets, "target")
        Ey = self.factors(sources, "source")
        w = (self.wg if gauss else self.wk) * self.C
        if conormal is not None:
            conormal = np.asarray(conormal).reshape(2, -1)
            Ex = Ex * 1j * (np.outer(conormal[0], self.k1) + np.outer(conormal[1], self.a))
        return (Ex * w[None, :]) @ Ey.T

    def gradient_matrices(self, targets, sources):
        Ex = self.factors(targets, "target")
        Ey = self.factors(sources, "source")
        w = self.wk * self.C
        g1 = (Ex * (1j * self.k1 * w)[None, :]) @ Ey.T
        g2 = (Ex * (1j * self.a * w)[None, :]) @ Ey.T
        return g1, g2


def sommerfeld_rule(medium: LayeredMedium, targets, sources, tol=1e-9, n_probe=10) -> SommerfeldRule:
    """Build a fixed rule adapted on a probe subset of the pairs.

    All targets must be on one side of the interface and all sources on one
    side.  The probe set contains the shallowest points and the widest
    horizontal separations, which are the hardest pairs for the rule.
    """
    targets = np.asarray(targets, dtype=float).reshape(2, -1)
    sources = np.asarray(sources, dtype=float).reshape(2, -1)
    t_side = _side(targets[1])
    s_side = _side(sources[1])
    center = 0.5 * (np.min(np.r_[targets[0], sources[0]]) + np.max(np.r_[targets[0], sources[0]]))
    X_span = np.max(targets[0]) - np.min(sources[0])
    X_span = max(X_span, np.max(sources[0]) - np.min(targets[0]), 0.0)
    contour = default_contour(medium, X_span)
    y2_ref = 1.0 if s_side > 0 else -1.0
    x2_ref = 1.0 if t_side > 0 else -1.0

    tp = _probe(targets, n_probe)
    sp_ = _probe(sources, n_probe)
    TX = tp[0][:, None] - sp_[0][None, :]
    TX2 = np.broadcast_to(tp[1][:, None], TX.shape).ravel()
    SY2 = np.broadcast_to(sp_[1][None, :], TX.shape).ravel()
    TX = TX.ravel()

    def parts(k1):
        return _spectral_parts(k1, x2_ref, y2_ref, medium)

    # tail: shallowest pair decays slowest
    i_shallow = np.argmin(np.abs(TX2) + np.abs(SY2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        expo_r = lambda t: np.max([_exponent_fn(X, TX2[i_shallow], SY2[i_shallow], medium, contour)(t)
                                   for X in (TX.min(), TX.max())], axis=0)
        T_right, _ = _tail_extent(expo_r, contour, tol, +1)
        T_left, _ = _tail_extent(expo_r, contour, tol, -1)

    def integrand(t):
        k1, dk = contour(t)
        C, a, b = parts(k1)
        ph = np.exp(1j * (np.outer(k1, TX) + np.outer(a, TX2) + np.outer(b, SY2)))
        return (C * dk / (2 * np.pi))[:, None] * ph

    breaks = _breakpoints(contour, -T_left, T_right, max(abs(TX.min()), abs(TX.max())), medium)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        _, err, panels = adaptive_gk15(integrand, breaks, tol)
    tq, wk, wg = panel_rule(panels)
    k1, dk = contour(tq)
    C, a, b = parts(k1)
    scale = dk / (2 * np.pi)
    return SommerfeldRule(k1, wk * scale, wg * scale, C, a, b, center, t_side, s_side,
                          len(panels), {"probe_error": float(np.max(err)), "tail": (T_left, T_right),
                                        "height": contour.height})


def _side(x2):
    up = np.all(x2 >= 0)
    down = np.all(x2 < 0)
    if not (up or down):
        raise ValueError("points straddle the interface; split them by side")
    return 1 if up else -1


def _probe(pts, n):
    """Extremal and evenly spaced representatives of a point set."""
    m = pts.shape[1]
    idx = set(np.linspace(0, m - 1, min(n, m)).astype(int).tolist())
    idx.update([int(np.argmax(pts[1] if pts[1].max() < 0 else -pts[1])), int(np.argmin(pts[0])),
                int(np.argmax(pts[0]))])
    idx.add(int(np.argmin(np.abs(pts[1]))))
    return pts[:, sorted(idx)]
