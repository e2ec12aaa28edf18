"""Periodic cell problem and effective coefficients of the micro-structured
lower half-space.

The corrector pair ``(chi1, chi2)`` solves, on the periodic cell,
``div(a (grad chi_j - e_j)) = 0`` with ``a = 1/mu_Y``, discretised by
cell-centred finite volumes with harmonic face averaging.  The effective
tensor is the cell average of the face fluxes ``a (e_j - grad chi_j)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence
from .kernels import cell_operator
from .model import MaterialSet, UnitCell

log = logging.getLogger(__name__)

CG_TOL = 1e-12
CG_MAXITER = 10_000
RESIDUAL_CONTRACT = 1e-10


@dataclass(frozen=True)
class CorrectorField:
    chi1: np.ndarray
    chi2: np.ndarray
    h1: float
    h2: float
    ax: np.ndarray  # face coefficients, x-faces
    ay: np.ndarray
    residuals: tuple
    iterations: tuple

    @property
    def shape(self):
        return self.chi1.shape


@dataclass(frozen=True)
class EffectiveMedium:
    A: np.ndarray
    eps_minus: float
    richardson: np.ndarray | None = None
    n_grid: tuple | None = None
    symmetry_defect: float = 0.0

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.shape != (2, 2):
            raise ValueError("A must be 2x2")
        object.__setattr__(self, "A", A)
        if np.min(np.linalg.eigvalsh(0.5 * (A + A.T))) <= 0:
            raise ValueError("effective tensor must be positive definite")
        if not self.eps_minus > 0:
            raise ValueError("eps_minus must be positive")

    @classmethod
    def isotropic(cls, mu, eps):
        return cls(np.eye(2) / mu, eps)

    def to_dict(self):
        out = {"A": self.A.tolist(), "eps_minus": float(self.eps_minus)}
        if self.richardson is not None:
            out["richardson"] = np.asarray(self.richardson).tolist()
        return out


def coefficient_grid(cell: UnitCell, materials: MaterialSet, n1, n2):
    """Rasterised ``1/mu_Y`` and ``eps_Y`` at cell centres."""
    mask = cell.rasterize(n1, n2)
    a = np.where(mask, 1.0 / materials.mu_B, 1.0 / materials.mu_host)
    eps = np.where(mask, materials.eps_B, materials.eps_host)
    return a, eps


def face_coefficients(a):
    """Harmonic means of ``a`` across x-faces and y-faces (periodic)."""
    ax = 2.0 / (1.0 / a + 1.0 / np.roll(a, -1, axis=0))
    ay = 2.0 / (1.0 / a + 1.0 / np.roll(a, -1, axis=1))
    return ax, ay


def _check_grid(n_grid):
    n1, n2 = (n_grid, n_grid) if np.isscalar(n_grid) else n_grid
    n1, n2 = int(n1), int(n2)
    for n in (n1, n2):
        if n < 16 or n & (n - 1):
            raise ValueError(f"grid size {n} must be a power of two >= 16")
    return n1, n2


def _pcg(apply, rhs, precond, tol, maxiter):
    """Preconditioned CG on the zero-mean subspace of a symmetric PSD operator."""
    rhs = rhs - rhs.mean()
    bnorm = np.linalg.norm(rhs)
    x = np.zeros_like(rhs)
    if bnorm == 0.0:
        return x, 0.0, 0
    r = rhs.copy()
    z = precond(r)
    p = z.copy()
    rz = np.vdot(r, z).real
    for it in range(1, maxiter + 1):
        Ap = apply(p)
        alpha = rz / np.vdot(p, Ap).real
        x += alpha * p
        x -= x.mean()
        r -= alpha * Ap
        r -= r.mean()
        res = np.linalg.norm(r) / bnorm
        if res < tol:
            return x, res, it
        z = precond(r)
        rz_new = np.vdot(r, z).real
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NonConvergence(f"cell CG did not converge in {maxiter} iterations", residual=res, iterations=maxiter)


def solve_corrector(cell: UnitCell, materials: MaterialSet, n_grid=(256, 256),
                    tol=CG_TOL, maxiter=CG_MAXITER) -> CorrectorField:
    n1, n2 = _check_grid(n_grid)
    h1, h2 = cell.ell1 / n1, cell.ell2 / n2
    a, _ = coefficient_grid(cell, materials, n1, n2)
    ax, ay = face_coefficients(a)

    # FFT inverse of the constant-coefficient periodic Laplacian
    abar = a.mean()
    s1 = (4.0 / h1**2) * np.sin(np.pi * np.arange(n1) / n1) ** 2
    s2 = (4.0 / h2**2) * np.sin(np.pi * np.arange(n2) / n2) ** 2
    sym = abar * (s1[:, None] + s2[None, :])
    sym[0, 0] = np.inf

    def precond(r):
        return np.fft.ifft2(np.fft.fft2(r) / sym).real

    def apply(u):
        return -cell_operator(u, ax, ay, h1, h2)

    chis, residuals, iters = [], [], []
    for rhs in ((ax - np.roll(ax, 1, axis=0)) / h1, (ay - np.roll(ay, 1, axis=1)) / h2):
        chi, _, it = _pcg(apply, -rhs, precond, tol, maxiter)
        chi -= chi.mean()
        bn = np.linalg.norm(rhs)
        true_res = np.linalg.norm(cell_operator(chi, ax, ay, h1, h2) - rhs) / bn if bn > 0 else 0.0
        if true_res > RESIDUAL_CONTRACT:
            raise NonConvergence(f"cell corrector residual {true_res:.3e} above contract",
                                 residual=true_res, iterations=it)
        chis.append(chi)
        residuals.append(true_res)
        iters.append(it)
    log.debug("cell problem %dx%d solved in %s iterations", n1, n2, iters)
    return CorrectorField(chis[0], chis[1], h1, h2, ax, ay, tuple(residuals), tuple(iters))


def effective_tensor(chi: CorrectorField, cell: UnitCell = None, materials: MaterialSet = None):
    """Cell average of ``(1/mu_Y)(I - grad chi)`` on the solver's faces.

    Returns ``(A, symmetry_defect)``; column ``j`` comes from ``chi_j``.
    """
    ax, ay, h1, h2 = chi.ax, chi.ay, chi.h1, chi.h2
    A = np.empty((2, 2))
    for j, c in enumerate((chi.chi1, chi.chi2)):
        dx = (np.roll(c, -1, axis=0) - c) / h1
        dy = (np.roll(c, -1, axis=1) - c) / h2
        A[0, j] = np.mean(ax * ((j == 0) - dx))
        A[1, j] = np.mean(ay * ((j == 1) - dy))
    return A, abs(A[0, 1] - A[1, 0])


def effective_permittivity(cell: UnitCell, materials: MaterialSet) -> float:
    f = cell.area_fraction
    return f * materials.eps_B + (1.0 - f) * materials.eps_host


def homogenize(cell: UnitCell, materials: MaterialSet, n_grid=(256, 256),
               richardson_order=1.0) -> EffectiveMedium:
    """Effective tensor and permittivity with a coarse-grid error estimate.

    The estimate compares against the solve at half resolution assuming
    convergence of order ``richardson_order`` (staircase-limited).
    """
    n1, n2 = _check_grid(n_grid)
    A, defect = effective_tensor(solve_corrector(cell, materials, (n1, n2)))
    est = None
    if min(n1, n2) >= 32:
        A_half, _ = effective_tensor(solve_corrector(cell, materials, (n1 // 2, n2 // 2)))
        est = np.abs(A - A_half) / (2.0**richardson_order - 1.0)
    return EffectiveMedium(A, effective_permittivity(cell, materials), est, (n1, n2), defect)


def voigt_reuss_bounds(cell: UnitCell, materials: MaterialSet, n_grid=(256, 256)):
    """Harmonic and arithmetic means of ``1/mu_Y`` on the rasterisation."""
    n1, n2 = _check_grid(n_grid)
    a, _ = coefficient_grid(cell, materials, n1, n2)
    return 1.0 / np.mean(1.0 / a), np.mean(a)
