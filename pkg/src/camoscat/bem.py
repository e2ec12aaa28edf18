"""Nyström boundary-integral solver for a buried penetrable object.

Outside the object the field is ``U + S phi`` with the layered kernel
``G``; inside it is ``S_D psi_D`` with the whole-space kernel of the
object's material.  Both single-layer traces and their conormal traces are
discretised with the trapezoid rule plus Kress's logarithmic splitting on
a smooth closed curve.  The layered kernel is split into the closed-form
whole-space part of the effective medium (treated by the same log
splitting) and a smooth correction evaluated through a fixed Sommerfeld
rule, which factorises over targets and sources.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy import special

from . import kernels
from .errors import AssemblySingular, NearBoundary
from .layered import (LayeredMedium, anisotropic_freespace_green, anomaly_green,  # noqa: F401
                      freespace_green, sommerfeld_rule)
from .quadrature import kress_matrix

EULER_GAMMA = 0.5772156649015329
RESIDUAL_LIMIT = 1e-10


@dataclass(frozen=True)
class BoundaryMesh:
    """Equispaced nodes ``t_j = 2 pi j / N`` on a smooth closed curve."""

    t: np.ndarray
    points: np.ndarray      # (2, N)
    d1: np.ndarray          # x'(t)
    d2: np.ndarray          # x''(t)
    normals: np.ndarray     # unit outward normals
    jacobian: np.ndarray    # |x'(t)|
    weights: np.ndarray     # trapezoid weight times jacobian

    @property
    def n(self):
        return self.t.size

    @property
    def spacing(self):
        return float(self.weights.max())

    @classmethod
    def from_shape(cls, shape, n_nodes):
        if n_nodes % 2 or n_nodes < 8:
            raise ValueError("the number of nodes must be even and at least 8")
        t = 2 * np.pi * np.arange(n_nodes) / n_nodes
        p, d1, d2 = shape.curve(t)
        jac = np.hypot(d1[0], d1[1])
        if jac.min() <= 1e-6 * jac.max():
            raise ValueError("parametrisation speed vanishes")
        signed = 0.5 * np.sum(p[0] * d1[1] - p[1] * d1[0]) * (2 * np.pi / n_nodes)
        if signed <= 0:
            raise ValueError("boundary must be counter-clockwise so that normals point outwards")
        normals = np.vstack([d1[1], -d1[0]]) / jac
        return cls(t, p, d1, d2, normals, jac, jac * 2 * np.pi / n_nodes)

    def contains(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        inside = kernels.points_in_polygon(x1.ravel(), np.asarray(x2, dtype=float).ravel(),
                                           self.points[0], self.points[1])
        return inside.reshape(x1.shape)

    def distance(self, x1, x2):
        """Distance to the nodes (a fine enough proxy at the refusal radius)."""
        x1 = np.asarray(x1, dtype=float).ravel()
        x2 = np.asarray(x2, dtype=float).ravel()
        d = np.full(x1.shape, np.inf)
        for s in range(0, self.n, 256):
            px = self.points[0, s:s + 256, None]
            py = self.points[1, s:s + 256, None]
            d = np.minimum(d, np.sqrt((x1 - px) ** 2 + (x2 - py) ** 2).min(axis=0))
        return d


# --- boundary operators of a whole-space kernel ---------------------------------------

@dataclass(frozen=True)
class FreeKernel:
    """Whole-space kernel of ``div(A grad) + omega^2 eps`` with ``-delta`` source."""

    A: np.ndarray
    eps: float
    omega: float

    @property
    def k(self):
        return self.omega * math.sqrt(self.eps)

    @property
    def c0(self):
        return 1.0 / math.sqrt(np.linalg.det(self.A))

    def __call__(self, x, y, grad=False):
        return freespace_green(x, y, self.A, self.eps, self.omega, grad=grad)


def boundary_operators(kernel: FreeKernel, mesh: BoundaryMesh):
    """Matrices of the single-layer trace ``S`` and the principal-value
    conormal operator ``K'`` (``nu . A grad_x``) acting on nodal densities."""
    n = mesh.n
    Ainv = np.linalg.inv(kernel.A)
    c0, k = kernel.c0, kernel.k
    d = mesh.points[:, :, None] - mesh.points[:, None, :]
    rho2 = np.einsum("ij,iab,jab->ab", Ainv, d, d)
    off = ~np.eye(n, dtype=bool)
    rho = np.sqrt(np.where(off, rho2, 1.0))
    z = k * rho
    jac_src = mesh.jacobian[None, :]
    log_term = np.log(4 * np.sin(0.5 * (mesh.t[:, None] - mesh.t[None, :])) ** 2 + ~off)
    h0 = special.hankel1(0, z)
    h1 = special.hankel1(1, z)
    j0 = special.j0(z)
    j1 = special.j1(z)

    full_s = 0.25j * c0 * h0 * jac_src
    m1 = -c0 / (4 * np.pi) * j0 * jac_src
    m2 = np.where(off, full_s - m1 * log_term, 0.0)
    speed_metric = np.sqrt(np.einsum("ij,ia,ja->a", Ainv, mesh.d1, mesh.d1))
    diag_s = c0 * (0.25j - (EULER_GAMMA + np.log(0.5 * k * speed_metric)) / (2 * np.pi)) * mesh.jacobian
    m1[~off] = -c0 / (4 * np.pi) * mesh.jacobian
    m2[~off] = diag_s

    nu_d = np.einsum("ia,iab->ab", mesh.normals, d)
    full_k = -0.25j * k * c0 * h1 * nu_d / rho * jac_src
    l1 = k * c0 / (4 * np.pi) * j1 * nu_d / rho * jac_src
    l2 = np.where(off, full_k - l1 * log_term, 0.0)
    l1[~off] = 0.0
    nu_dd = np.einsum("ia,ia->a", mesh.normals, mesh.d2)
    l2[~off] = c0 / (4 * np.pi) * nu_dd * mesh.jacobian / speed_metric**2

    R = kress_matrix(n)
    h = 2 * np.pi / n
    S = R * m1 + h * m2
    K = R * l1 + h * l2
    return S, K


def layer_potential(kernel: FreeKernel, mesh: BoundaryMesh, density, x):
    """Off-boundary single layer ``int G(x, y) density(y) dsigma(y)`` and its gradient
    by the trapezoid rule.  ``x`` has shape ``(2, m)``."""
    x = np.asarray(x, dtype=float).reshape(2, -1)
    g, flux = kernel(x[:, :, None], mesh.points[:, None, :], grad=True)
    wd = mesh.weights * density
    value = g @ wd
    grad = np.linalg.solve(kernel.A, np.einsum("iab,b->ia", flux, wd))
    return value, grad


# --- the background -----------------------------------------------------------------

@dataclass(frozen=True)
class WholeSpaceBackground:
    """Plane wave ``exp(i k theta . x)`` in a homogeneous whole space with
    coefficient tensor ``A`` and permittivity ``eps`` (the lower medium
    extended upwards); used to test the solver against series solutions."""

    A: np.ndarray
    eps: float
    omega: float
    theta: tuple
    amplitude: complex = 1.0

    @property
    def wavevector(self):
        # A k.k = omega^2 eps along direction theta
        th = np.asarray(self.theta, dtype=float)
        return self.omega * math.sqrt(self.eps / (th @ np.asarray(self.A) @ th)) * th

    def value(self, x1, x2):
        kv = self.wavevector
        return self.amplitude * np.exp(1j * (kv[0] * np.asarray(x1) + kv[1] * np.asarray(x2)))

    def gradient(self, x1, x2):
        kv = self.wavevector
        u = self.value(x1, x2)
        return np.stack([1j * kv[0] * u, 1j * kv[1] * u])


# --- exterior kernel ------------------------------------------------------------------

@dataclass
class ExteriorKernel:
    """Layered kernel of the lower medium: whole-space part plus optional
    smooth correction.  ``layered`` is ``None`` for a whole-space problem."""

    free: FreeKernel
    layered: LayeredMedium | None = None
    tol: float = 1e-9
    _rules: dict = field(default_factory=dict)

    def correction_rule(self, targets, sources, key):
        if self.layered is None:
            return None
        if key not in self._rules:
            self._rules[key] = sommerfeld_rule(self.layered, targets, sources, tol=self.tol)
        return self._rules[key]


def _exterior_kernel(medium, background):
    if isinstance(background, WholeSpaceBackground):
        return ExteriorKernel(FreeKernel(np.asarray(background.A, float), background.eps, background.omega))
    m = medium if medium is not None else background.medium
    return ExteriorKernel(FreeKernel(m.A, m.eps_minus, m.omega), m)


# --- system -------------------------------------------------------------------------

@dataclass
class BEMSystem:
    mesh: BoundaryMesh
    matrix: np.ndarray
    rhs: np.ndarray
    exterior: ExteriorKernel
    interior: FreeKernel
    background: object
    timings: dict = field(default_factory=dict)


def assemble_system(mesh: BoundaryMesh, background, materials, omega=None, medium=None, tol=1e-9) -> BEMSystem:
    """Dense ``2N x 2N`` system for ``(phi, psi_D)``.

    Rows ``0..N-1`` impose continuity of the trace,
    ``S_D psi_D - S phi = U``; rows ``N..2N-1`` continuity of the conormal
    flux, ``(phi + psi_D)/2 + K'_D psi_D - K' phi = nu . A grad U``.
    """
    t0 = time.perf_counter()
    exterior = _exterior_kernel(medium, background)
    omega = exterior.free.omega if omega is None else omega
    interior = FreeKernel(np.eye(2) / materials.mu_D, materials.eps_D, omega)
    S_in, K_in = boundary_operators(interior, mesh)
    S_out, K_out = boundary_operators(exterior.free, mesh)
    rule = exterior.correction_rule(mesh.points, mesh.points, "boundary")
    if rule is not None:
        w = mesh.weights[None, :]
        conormal = exterior.free.A.T @ mesh.normals
        S_out = S_out + rule.matrix(mesh.points, mesh.points) * w
        K_out = K_out + rule.matrix(mesh.points, mesh.points, conormal=conormal) * w
    t1 = time.perf_counter()
    n = mesh.n
    I = np.eye(n)
    M = np.block([[-S_out, S_in], [0.5 * I - K_out, 0.5 * I + K_in]])
    u = background.value(*mesh.points)
    g = background.gradient(*mesh.points)
    flux = np.einsum("ia,ij,ja->a", mesh.normals, exterior.free.A, g)
    rhs = np.concatenate([u, flux])
    return BEMSystem(mesh, M, rhs, exterior, interior, background,
                     {"assembly_s": t1 - t0, "correction_panels": 0 if rule is None else rule.panels})


@dataclass(frozen=True)
class LayerDensities:
    phi: np.ndarray
    psiD: np.ndarray
    residual: float
    condition: float
    system: BEMSystem

    def scaled(self, factor):
        return LayerDensities(factor * self.phi, factor * self.psiD, self.residual, self.condition, self.system)


def solve_densities(system: BEMSystem) -> LayerDensities:
    """Dense LU with partial pivoting, residual check and 1-norm condition estimate."""
    M = system.matrix
    lu, piv = sla.lu_factor(M, check_finite=True)
    if np.min(np.abs(np.diag(lu))) <= np.finfo(float).eps * np.abs(lu).max() * M.shape[0]:
        raise AssemblySingular("boundary system is numerically singular", condition=np.inf)
    x = sla.lu_solve((lu, piv), system.rhs)
    anorm = np.linalg.norm(M, 1)
    from scipy.linalg import lapack  # noqa: PLC0415
    rcond, _ = lapack.zgecon(lu, anorm, norm="1")
    condition = 1.0 / rcond if rcond > 0 else np.inf
    res = np.linalg.norm(M @ x - system.rhs) / max(np.linalg.norm(system.rhs), 1e-300)
    if res > RESIDUAL_LIMIT:
        # one step of iterative refinement before giving up
        x = x + sla.lu_solve((lu, piv), system.rhs - M @ x)
        res = np.linalg.norm(M @ x - system.rhs) / max(np.linalg.norm(system.rhs), 1e-300)
    if not np.all(np.isfinite(x)) or res > RESIDUAL_LIMIT:
        raise AssemblySingular(f"dense solve residual {res:.3e} too large", condition=condition)
    n = system.mesh.n
    return LayerDensities(x[:n], x[n:], float(res), float(condition), system)


# --- evaluation ----------------------------------------------------------------------

@dataclass
class FieldGrid:
    x1: np.ndarray
    x2: np.ndarray
    total: np.ndarray
    background: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def scattered(self):
        return self.total - self.background

    def rows(self):
        X1, X2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        u = self.total
        return np.column_stack([X1.ravel(), X2.ravel(), u.real.ravel(), u.imag.ravel(), np.abs(u).ravel()])


def single_layer(kernel, mesh: BoundaryMesh, density, x, on_boundary=False, exterior=None):
    """Single-layer potential of ``density`` at the points ``x`` (shape ``(2, m)``).

    Off the boundary the trapezoid rule is used and points closer than two
    node spacings raise :class:`NearBoundary`.  With ``on_boundary=True``
    ``x`` is ignored and the trace at the nodes is returned (Kress splitting).
    ``exterior`` adds the smooth layered correction.
    """
    density = np.asarray(density, dtype=complex)
    if on_boundary:
        S, _ = boundary_operators(kernel, mesh)
        out = S @ density
        if exterior is not None and exterior.layered is not None:
            rule = exterior.correction_rule(mesh.points, mesh.points, "boundary")
            out = out + rule.matrix(mesh.points, mesh.points) @ (mesh.weights * density)
        return out
    x = np.asarray(x, dtype=float).reshape(2, -1)
    if np.any(mesh.distance(x[0], x[1]) < 2 * mesh.spacing):
        raise NearBoundary("evaluation point within two node spacings of the boundary")
    return _potential(kernel, mesh, density, x, exterior)[0]


def _potential(kernel, mesh, density, x, exterior=None):
    value = np.zeros(x.shape[1], dtype=complex)
    grad = np.zeros((2, x.shape[1]), dtype=complex)
    below = x[1] < 0
    if exterior is None or exterior.layered is None:
        for s in _chunks(x.shape[1]):
            value[s], grad[:, s] = layer_potential(kernel, mesh, density, x[:, s])
        return value, grad
    wd = mesh.weights * density
    for side, mask in ((-1, below), (1, ~below)):
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            continue
        pts = x[:, idx]
        rule = exterior.correction_rule(pts, mesh.points, ("grid", side, pts.shape[1], float(pts.sum())))
        for s in _chunks(idx.size):
            sub = pts[:, s]
            g1, g2 = rule.gradient_matrices(sub, mesh.points)
            v = rule.matrix(sub, mesh.points) @ wd
            gr = np.vstack([g1 @ wd, g2 @ wd])
            if side < 0:
                fv, fg = layer_potential(kernel, mesh, density, sub)
                v, gr = v + fv, gr + fg
            value[idx[s]] = v
            grad[:, idx[s]] = gr
    return value, grad


def _chunks(n, size=2048):
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def field_at(densities: LayerDensities, x, refuse_near=True):
    """Total field at points ``x`` of shape ``(2, m)``; points within two node
    spacings of the boundary are NaN."""
    sysm = densities.system
    mesh = sysm.mesh
    x = np.asarray(x, dtype=float).reshape(2, -1)
    near = mesh.distance(x[0], x[1]) < 2 * mesh.spacing if refuse_near else np.zeros(x.shape[1], bool)
    inside = mesh.contains(x[0], x[1]) & ~near
    outside = ~inside & ~near
    u = np.full(x.shape[1], np.nan + 0j)
    U = sysm.background.value(x[0], x[1])
    if inside.any():
        u[inside] = _potential(sysm.interior, mesh, densities.psiD, x[:, inside])[0]
    if outside.any():
        u[outside] = U[outside] + _potential(sysm.exterior.free, mesh, densities.phi,
                                             x[:, outside], sysm.exterior)[0]
    return u, U, int(near.sum())


def total_field(densities: LayerDensities, x1, x2) -> FieldGrid:
    """Total field on the tensor grid ``x1 x x2`` (NaN near the boundary)."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    u, U, n_near = field_at(densities, np.vstack([X1.ravel(), X2.ravel()]))
    return FieldGrid(x1, x2, u.reshape(X1.shape), U.reshape(X1.shape), {"near_boundary": n_near})
