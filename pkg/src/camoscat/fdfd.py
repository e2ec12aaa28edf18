"""Frequency-domain finite-volume reference solver.

Cell-centred unknowns on a tensor grid (uniform in ``x1``, piecewise
graded in ``x2``), flux form ``div(a grad u) + omega^2 eps u`` with
series-resistance (harmonic) face coefficients, optional tensor cross
terms, complex-stretched absorbing layers, optional Bloch-periodic
closure in ``x1`` and optional generalised impedance conditions on the
face row ``x2 = 0`` carried by extra face unknowns (upper and lower
traces).

Plane-wave and layered problems are solved for the scattered part
``w = u - u_ref``: ``L w = -(L - L_ref) u_ref``, so that the source lives
only where the coefficients differ from the reference problem.
"""
from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import RectBivariateSpline

from .errors import CamoscatError, ResidualTooHigh, WindowOutsideGrid
from .strip import TransmissionCoefficients

RESIDUAL_LIMIT = 1e-8
CROSS_NEGLIGIBLE = 1e-12  # relative size below which mixed-derivative terms are dropped
PML_DECAY = 18.0   # target log-amplitude decay across a layer at normal incidence


class FactorTooLarge(CamoscatError, MemoryError):
    """The estimated sparse factor does not fit the available memory."""


# --- grid ----------------------------------------------------------------------------

def graded_edges(breaks, spacings, ratio=1.15):
    """Cell edges through the given break points.

    ``spacings[k]`` is the target cell size on ``[breaks[k], breaks[k+1]]``.
    Every break is an edge.  Where two neighbouring segments differ in
    size, the coarser one starts with cells that grow geometrically from
    the finer size at ``ratio`` per cell.
    """
    breaks = np.asarray(breaks, dtype=float)
    spacings = np.asarray(spacings, dtype=float)
    edges = [breaks[0]]
    for k in range(len(spacings)):
        a, b = breaks[k], breaks[k + 1]
        h = spacings[k]
        left = spacings[k - 1] if k > 0 else h
        right = spacings[k + 1] if k + 1 < len(spacings) else h
        sizes_l = _ramp(min(left, h), h, ratio)
        sizes_r = _ramp(min(right, h), h, ratio)[::-1]
        length = b - a
        ramp_len = sum(sizes_l) + sum(sizes_r)
        if ramp_len > 0.8 * length:
            sizes_l, sizes_r = [], []
            ramp_len = 0.0
        n_mid = max(1, int(round((length - ramp_len) / h)))
        mid = [(length - ramp_len) / n_mid] * n_mid
        sizes = np.array(sizes_l + mid + sizes_r)
        sizes *= length / sizes.sum()
        edges.extend(a + np.cumsum(sizes))
        edges[-1] = b
    return np.array(edges)


def uniform_edges(lo, hi, h):
    """Edges ``h * k`` covering ``[lo, hi]``; zero is always an edge."""
    return h * np.arange(math.floor(lo / h + 1e-9), math.ceil(hi / h - 1e-9) + 1)


def _ramp(h_start, h_end, ratio):
    sizes = []
    h = h_start * ratio
    while h < h_end / ratio:
        sizes.append(h)
        h *= ratio
    return sizes


@dataclass(frozen=True)
class PML:
    """Absorbing layers of the given thicknesses (left, right, bottom, top)."""

    thickness: tuple = (1.0, 1.0, 1.0, 1.0)
    wavenumber: float = 2 * np.pi

    @property
    def strength(self):
        return tuple(3.0 * PML_DECAY / (self.wavenumber * t) if t > 0 else 0.0 for t in self.thickness)

    def stretch(self, x, lo, hi, axis):
        """``s(x)`` and the stretched-coordinate offset ``Im(x_tilde)``."""
        x = np.asarray(x, dtype=float)
        tl, tr = self.thickness[2 * axis], self.thickness[2 * axis + 1]
        sl, sr = self.strength[2 * axis], self.strength[2 * axis + 1]
        dl = np.clip((lo + tl - x) / tl, 0, None) if tl > 0 else np.zeros_like(x)
        dr = np.clip((x - (hi - tr)) / tr, 0, None) if tr > 0 else np.zeros_like(x)
        sigma = sl * dl**2 + sr * dr**2
        offset = -sl * tl * dl**3 / 3 + sr * tr * dr**3 / 3
        return 1.0 + 1j * sigma, offset


@dataclass(frozen=True)
class Grid:
    """Tensor grid.  ``bloch`` is the quasi-period phase ``exp(i k1 width)`` or
    ``None`` for absorbing/Dirichlet lateral closure."""

    x1_edges: np.ndarray
    x2_edges: np.ndarray
    pml: PML
    bloch: complex | None = None
    interface: bool = False

    def __post_init__(self):
        if self.interface and not np.any(np.isclose(self.x2_edges, 0.0, atol=1e-13)):
            raise ValueError("x2 = 0 must be a cell edge when interface unknowns are used")
        h1 = np.diff(self.x1_edges)
        if np.ptp(h1) > 1e-9 * h1.mean():
            raise ValueError("x1 spacing must be uniform")

    @property
    def n1(self):
        return self.x1_edges.size - 1

    @property
    def n2(self):
        return self.x2_edges.size - 1

    @property
    def h1(self):
        return (self.x1_edges[-1] - self.x1_edges[0]) / self.n1

    @property
    def h2(self):
        return np.diff(self.x2_edges)

    @property
    def x1(self):
        return 0.5 * (self.x1_edges[1:] + self.x1_edges[:-1])

    @property
    def x2(self):
        return 0.5 * (self.x2_edges[1:] + self.x2_edges[:-1])

    @property
    def interface_row(self):
        """Index of the first cell row above ``x2 = 0``."""
        return int(np.argmin(np.abs(self.x2_edges - 0.0)))

    @property
    def n_unknowns(self):
        return self.n1 * self.n2 + (2 * self.n1 if self.interface else 0)

    def stretch1(self, x):
        if self.bloch is not None:
            x = np.asarray(x, dtype=float)
            return np.ones_like(x, dtype=complex), np.zeros_like(x)
        return self.pml.stretch(x, self.x1_edges[0], self.x1_edges[-1], 0)

    def stretch2(self, x):
        return self.pml.stretch(x, self.x2_edges[0], self.x2_edges[-1], 1)

    def physical_box(self):
        """The part of the grid outside the absorbing layers."""
        t = self.pml.thickness
        lat = self.bloch is None
        return (self.x1_edges[0] + (t[0] if lat else 0), self.x1_edges[-1] - (t[1] if lat else 0),
                self.x2_edges[0] + t[2], self.x2_edges[-1] - t[3])

    def refined(self):
        """Every cell split in two (for Richardson extrapolation)."""
        def split(e):
            mid = 0.5 * (e[1:] + e[:-1])
            out = np.empty(2 * e.size - 1)
            out[0::2], out[1::2] = e, mid
            return out
        bloch = None if self.bloch is None else self.bloch
        return Grid(split(self.x1_edges), split(self.x2_edges), self.pml, bloch, self.interface)


# --- media ---------------------------------------------------------------------------

@dataclass
class CellCoefficients:
    a11: np.ndarray
    a22: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    eps: np.ndarray


def _isotropic(mu_inv, eps):
    z = np.zeros_like(mu_inv)
    return CellCoefficients(mu_inv.copy(), mu_inv.copy(), z, z.copy(), eps)


@dataclass(frozen=True)
class UniformMedium:
    mu: float
    eps: float

    def __call__(self, X1, X2, H1, H2):
        return _isotropic(np.full(X1.shape, 1.0 / self.mu), np.full(X1.shape, float(self.eps)))


def _subcell_fraction(shape, X1, X2, H1, H2, n_sub=16):
    """Area fraction of ``shape`` in each cell by midpoint sub-sampling
    (only evaluated in cells near the shape's bounding box)."""
    frac = np.zeros(X1.shape)
    x0, x1, y0, y1 = shape.bbox()
    near = (X1 + H1 / 2 > x0) & (X1 - H1 / 2 < x1) & (X2 + H2 / 2 > y0) & (X2 - H2 / 2 < y1)
    if not near.any():
        return frac
    o = (np.arange(n_sub) + 0.5) / n_sub - 0.5
    cx, cy, hx, hy = X1[near], X2[near], H1[near], H2[near]
    acc = np.zeros(cx.shape)
    for a in o:
        for b in o:
            acc += shape.contains(cx + a * hx, cy + b * hy)
    frac[near] = acc / n_sub**2
    return frac


@dataclass(frozen=True)
class EffectiveLayeredMedium:
    """Upper medium above ``x2 = 0``, homogenised tensor below, optional object ``D``.

    Inside ``D`` the permittivity is the cell area-fraction mixture and
    ``1/mu`` the arithmetic mixture of the tensor and ``I/mu_D``.
    """

    mu_plus: float
    eps_plus: float
    A: np.ndarray
    eps_minus: float
    inclusion: object = None
    mu_D: float = 1.0
    eps_D: float = 1.0

    def __call__(self, X1, X2, H1, H2):
        up = X2 > 0
        A = np.asarray(self.A, dtype=float)
        a11 = np.where(up, 1.0 / self.mu_plus, A[0, 0])
        a22 = np.where(up, 1.0 / self.mu_plus, A[1, 1])
        a12 = np.where(up, 0.0, A[0, 1])
        a21 = np.where(up, 0.0, A[1, 0])
        eps = np.where(up, self.eps_plus, self.eps_minus)
        if self.inclusion is not None:
            f = _subcell_fraction(self.inclusion, X1, X2, H1, H2)
            inv_d = 1.0 / self.mu_D
            a11 = (1 - f) * a11 + f * inv_d
            a22 = (1 - f) * a22 + f * inv_d
            a12 = (1 - f) * a12
            a21 = (1 - f) * a21
            eps = (1 - f) * eps + f * self.eps_D
        return CellCoefficients(a11, a22, a12, a21, eps.astype(float))


@dataclass(frozen=True)
class MultiscaleMedium:
    """The rough layer and the periodic micro-structure, resolved cell by cell.

    Above ``x2 = xi f(x1/xi)``: upper medium.  Between ``0`` and that curve:
    layer material.  For ``-buffer < x2 < 0``: host with inclusions ``B``
    (cell pattern scaled by ``xi``).  Below the buffer the homogenised
    tensor and permittivity take over, so that the absorbing layer sees a
    homogeneous medium.  Coefficients are sampled at cell centres.
    """

    materials: object
    profile: object
    cell: object
    buffer: float
    A: np.ndarray
    eps_minus: float
    inclusion: object = None

    def __call__(self, X1, X2, H1, H2):
        m = self.materials
        xi = self.profile.xi
        lay_top = xi * self.profile(X1 / xi)
        above = X2 >= lay_top
        layer = (X2 > 0) & ~above
        micro = (X2 <= 0) & (X2 > -self.buffer)
        deep = X2 <= -self.buffer
        inB = micro & np.asarray(self.cell.contains(X1 / xi, X2 / xi), dtype=bool)
        mu_inv = np.select([above, layer, inB, micro], [1 / m.mu_plus, 1 / m.mu_cl, 1 / m.mu_B, 1 / m.mu_host], 0.0)
        eps = np.select([above, layer, inB, micro], [m.eps_plus, m.eps_cl, m.eps_B, m.eps_host], 0.0)
        c = _isotropic(mu_inv, eps)
        A = np.asarray(self.A, dtype=float)
        c.a11 = np.where(deep, A[0, 0], c.a11)
        c.a22 = np.where(deep, A[1, 1], c.a22)
        c.a12 = np.where(deep, A[0, 1], 0.0)
        c.a21 = np.where(deep, A[1, 0], 0.0)
        c.eps = np.where(deep, self.eps_minus, c.eps)
        if self.inclusion is not None:
            if np.any(self.inclusion.bbox()[3] > -self.buffer):
                raise ValueError("the object D must lie in the homogenised region below the buffer")
            f = _subcell_fraction(self.inclusion, X1, X2, H1, H2)
            inv_d = 1.0 / m.mu_D
            c.a11 = (1 - f) * c.a11 + f * inv_d
            c.a22 = (1 - f) * c.a22 + f * inv_d
            c.a12 = (1 - f) * c.a12
            c.a21 = (1 - f) * c.a21
            c.eps = (1 - f) * c.eps + f * m.eps_D
        return c


# --- operator ------------------------------------------------------------------------

def _sample(grid: Grid, medium):
    X1, X2 = np.meshgrid(grid.x1, grid.x2, indexing="ij")
    H1 = np.full(X1.shape, grid.h1)
    H2 = np.broadcast_to(grid.h2[None, :], X1.shape).copy()
    return medium(X1, X2, H1, H2), X1, X2, H1, H2


class _Builder:
    def __init__(self, n):
        self.rows, self.cols, self.vals = [], [], []
        self.n = n

    def add(self, r, c, v):
        r, c, v = np.broadcast_arrays(np.asarray(r), np.asarray(c), np.asarray(v, dtype=complex))
        self.rows.append(r.ravel())
        self.cols.append(c.ravel())
        self.vals.append(v.ravel())

    def matrix(self):
        return sp.csc_matrix((np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
                             shape=(self.n, self.n))


def assemble_operator(grid: Grid, medium, omega, coeffs: TransmissionCoefficients | None = None,
                      k_plus=None):
    """Sparse matrix of the cell-integrated operator (rows scaled by cell area).

    With ``grid.interface`` the face unknowns ``p`` (upper trace) and ``m``
    (lower trace) follow the cell unknowns; their rows impose the trace
    jump and the flux balance with the given transmission coefficients.
    """
    c, X1, X2, H1, H2 = _sample(grid, medium)
    n1, n2 = grid.n1, grid.n2
    h1 = grid.h1
    h2 = grid.h2
    idx = np.arange(n1 * n2).reshape(n1, n2)
    s1c, _ = grid.stretch1(grid.x1)
    s2c, _ = grid.stretch2(grid.x2)
    S1 = s1c[:, None]
    S2 = s2c[None, :]
    a11 = c.a11 * S2 / S1
    a22 = c.a22 * S1 / S2
    a12 = c.a12 * np.ones_like(S1 * S2)
    a21 = c.a21 * np.ones_like(S1 * S2)
    b = _Builder(grid.n_unknowns)
    area = h1 * h2[None, :] * np.ones((n1, 1))
    b.add(idx, idx, omega**2 * c.eps * S1 * S2 * area)

    phase = grid.bloch
    j_up = grid.interface_row if grid.interface else None
    cut = np.zeros(n2 - 1, dtype=bool)
    if j_up is not None:
        cut[j_up - 1] = True

    # x1 faces
    if phase is None:
        left, right = idx[:-1], idx[1:]
        aL, aR = a11[:-1], a11[1:]
        ph = np.ones(1)
    else:
        left, right = idx, np.roll(idx, -1, axis=0)
        aL, aR = a11, np.roll(a11, -1, axis=0)
        ph = np.ones((n1, 1), dtype=complex)
        ph[-1] = phase
    T = 2 * aL * aR / (aL + aR) / h1 * h2[None, :]
    _flux_pair(b, left, right, T, ph)
    if phase is None:
        # Dirichlet closure outside the lateral absorbing layers
        for col, a in ((idx[0], a11[0]), (idx[-1], a11[-1])):
            b.add(col, col, -2 * a / h1 * h2)

    # x2 faces
    hb, ht = h2[:-1][None, :], h2[1:][None, :]
    aB, aT = a22[:, :-1], a22[:, 1:]
    T2 = h1 / (hb / (2 * aB) + ht / (2 * aT))
    keep = ~cut
    _flux_pair(b, idx[:, :-1][:, keep], idx[:, 1:][:, keep], T2[:, keep], np.ones(1))
    b.add(idx[:, 0], idx[:, 0], -2 * a22[:, 0] / h2[0] * h1)
    b.add(idx[:, -1], idx[:, -1], -2 * a22[:, -1] / h2[-1] * h1)

    ghost = None
    if j_up is not None:
        ghost = _interface_rows(b, grid, idx, a22, a21, X1, omega, coeffs, k_plus, s1c)

    scale = max(np.abs(c.a11).max(), np.abs(c.a22).max())
    if max(np.abs(c.a12).max(), np.abs(c.a21).max()) > CROSS_NEGLIGIBLE * scale:
        _cross_terms(b, grid, idx, a12, a21, cut, ghost)
    return b.matrix()


def _flux_pair(b, left, right, T, ph):
    """Flux ``T (u_right - u_left)`` leaving ``left`` and entering ``right``.

    ``ph`` is the Bloch phase attached to ``u_right`` as seen from ``left``.
    """
    b.add(left, right, T * ph)
    b.add(left, left, -T)
    b.add(right, left, T / ph)
    b.add(right, right, -T)


def _neighbours(grid, i):
    """Column indices ``i - 1, i + 1`` and the Bloch phases attached to them."""
    n1 = grid.n1
    im, ip = i - 1, i + 1
    pm = np.ones(i.shape, dtype=complex)
    pp = np.ones(i.shape, dtype=complex)
    valid_m = im >= 0
    valid_p = ip < n1
    if grid.bloch is not None:
        pm = np.where(valid_m, 1.0, 1.0 / grid.bloch)
        pp = np.where(valid_p, 1.0, grid.bloch)
        valid_m = valid_p = np.ones(i.shape, dtype=bool)
    return np.mod(im, n1), np.mod(ip, n1), pm * valid_m, pp * valid_p


def _interface_rows(b, grid, idx, a22, a21, X1, omega, coeffs, k_plus, s1c):
    n1 = grid.n1
    j_up = grid.interface_row
    j_dn = j_up - 1
    h1 = grid.h1
    hu, hd = grid.h2[j_up], grid.h2[j_dn]
    s1 = s1c
    s2_face, _ = grid.stretch2(np.array([0.0]))
    if abs(s2_face[0] - 1.0) > 0:
        raise ValueError("the interface must lie outside the vertical absorbing layers")
    nc = n1 * grid.n2
    i = np.arange(n1)
    P = nc + i
    M = nc + n1 + i
    up = idx[:, j_up]
    dn = idx[:, j_dn]
    im, ip, pm, pp = _neighbours(grid, i)
    if coeffs is None:
        coeffs = TransmissionCoefficients.zero(omega)
    psi, phi1, phi2, phi3 = coeffs.psi, coeffs.phi1, coeffs.phi2, coeffs.phi3
    kp2 = (k_plus or 0.0) ** 2
    Tu = a22[:, j_up] / (hu / 2) * h1       # flux into the upper cell through its bottom face
    Td = a22[:, j_dn] / (hd / 2) * h1
    # cells: bottom face of upper cells, top face of lower cells
    b.add(up, P, Tu)
    b.add(up, up, -Tu)
    b.add(dn, M, Td)
    b.add(dn, dn, -Td)
    # the top flux of lower cells also carries a21 d1 m over a face of length h1
    a21d = 0.5 * a21[:, j_dn]
    b.add(dn, nc + n1 + ip, a21d * pp)
    b.add(dn, nc + n1 + im, -a21d * pm)

    # trace jump: p - m - psi1 d1 p / s1 - psi2 (u_up - p)/(hu/2) = 0
    d1 = 1.0 / (2 * h1 * s1)
    # q = d2 U+ at the face: one-sided quadratic through p and the first two upper cells
    y1 = hu / 2
    y2 = hu + grid.h2[j_up + 1] / 2
    qp = -(1 / y1 + 1 / y2)
    q1 = y2 / (y1 * (y2 - y1))
    q2 = -y1 / (y2 * (y2 - y1))
    up2 = idx[:, j_up + 1]
    b.add(P, P, 1.0 - psi[1] * qp)
    b.add(P, M, -1.0)
    b.add(P, nc + ip, -psi[0] * d1 * pp)
    b.add(P, nc + im, psi[0] * d1 * pm)
    b.add(P, up, -psi[1] * q1)
    b.add(P, up2, -psi[1] * q2)

    # flux balance (per unit length, stretched form):
    # a22u (u_up - p)/(hu/2) - [a22d (m - u_dn)/(hd/2) + a21 d1 m]
    #   - s1 [phi1_1 d11 p + (phi1_2 + phi2_1) d1 q + phi2_2 (-k+^2 p - d11 p) + phi3 p] = 0
    # with q the one-sided d2 U+ and d1 -> d1/s1 inside the bracket.
    au = a22[:, j_up] / (hu / 2)
    ad = a22[:, j_dn] / (hd / 2)
    b.add(M, up, au)
    b.add(M, P, -au)
    b.add(M, M, -ad)
    b.add(M, dn, ad)
    a21m = a21[:, j_dn] / (2 * h1)
    b.add(M, nc + n1 + ip, -a21m * pp)
    b.add(M, nc + n1 + im, a21m * pm)
    c11 = phi1[0] - phi2[1]
    c12 = phi1[1] + phi2[0]
    # s1 * c11 * d11 p with d11 = (p+ - 2p + p-)/(h1^2 s1^2)
    w11 = c11 / (h1**2 * s1)
    b.add(M, nc + ip, -w11 * pp)
    b.add(M, P, 2 * w11)
    b.add(M, nc + im, -w11 * pm)
    # s1 * c12 * d1 q / s1 = c12 (q+ - q-) / (2 h1)
    w12 = c12 / (2 * h1)
    for nb, ph_, sgn in ((ip, pp, 1.0), (im, pm, -1.0)):
        b.add(M, idx[nb, j_up], -sgn * w12 * q1 * ph_)
        b.add(M, idx[nb, j_up + 1], -sgn * w12 * q2 * ph_)
        b.add(M, nc + nb, -sgn * w12 * qp * ph_)
    b.add(M, P, s1 * (phi2[1] * kp2 - phi3))
    return {"row": j_dn, "m": M}


def _cross_terms(b, grid, idx, a12, a21, cut, ghost):
    """Mixed-derivative fluxes ``a12 d2 u`` on x1 faces and ``a21 d1 u`` on x2 faces."""
    n1, n2 = grid.n1, grid.n2
    h1 = grid.h1
    y = grid.x2
    i = np.arange(n1)
    im, ip, pm, pp = _neighbours(grid, i)

    def d2_stencil(j):
        """Rows/cols/weights of ``d2 u`` at cell row ``j`` as a list of (col_index_array, weight)."""
        out = []
        jm, jp = j - 1, j + 1
        lower_ok = jm >= 0
        upper_ok = jp < n2
        if ghost is not None and j == ghost["row"]:
            # ghost above: 2 m - u_j sits at distance h_j / 2 + h_j / 2 = h_j from the centre
            if lower_ok:
                dy = grid.h2[j] + (y[j] - y[jm])
                out += [(ghost["m"], 2.0 / dy), (idx[:, j], -1.0 / dy), (idx[:, jm], -1.0 / dy)]
            return out
        if ghost is not None and j == ghost["row"] + 1:
            return out
        if lower_ok and upper_ok:
            dy = y[jp] - y[jm]
            out += [(idx[:, jp], 1.0 / dy), (idx[:, jm], -1.0 / dy)]
        elif upper_ok:
            dy = y[jp] - y[j]
            out += [(idx[:, jp], 1.0 / dy), (idx[:, j], -1.0 / dy)]
        elif lower_ok:
            dy = y[j] - y[jm]
            out += [(idx[:, j], 1.0 / dy), (idx[:, jm], -1.0 / dy)]
        return out

    # x1 faces: flux a12 * mean_i(d2 u) * h2_j between i and i+1
    last = n1 if grid.bloch is not None else n1 - 1
    for j in range(n2):
        if not (np.any(a12[:, j])):
            continue
        st = d2_stencil(j)
        if not st:
            continue
        L = np.arange(last)
        R = (L + 1) % n1
        phR = np.where(L + 1 < n1, 1.0, grid.bloch if grid.bloch is not None else 1.0)
        aF = 0.5 * (a12[L, j] + a12[R, j]) * grid.h2[j]
        for cols, w in st:
            # 0.5 * (d2u at L + d2u at R)
            for side, ph in ((L, 1.0), (R, phR)):
                val = 0.5 * aF * w * ph
                b.add(idx[L, j], cols[side], val)
                b.add(idx[R, j], cols[side], -val / phR)

    # x2 faces: flux a21 * mean_j(d1 u) * h1 between rows j and j+1
    for j in range(n2 - 1):
        if cut[j]:
            continue
        aF = 0.5 * (a21[:, j] + a21[:, j + 1]) * h1
        if not np.any(aF):
            continue
        for jj in (j, j + 1):
            w = aF / (2 * h1) * 0.5
            for nb, ph, sgn in ((ip, pp, 1.0), (im, pm, -1.0)):
                b.add(idx[:, j], idx[nb, jj], sgn * w * ph)
                b.add(idx[:, j + 1], idx[nb, jj], -sgn * w * ph)


# --- problems and solutions -------------------------------------------------------------

@dataclass
class DirectProblem:
    """A finite-volume solve.

    ``medium`` and ``reference`` are cell-coefficient samplers; the solve
    returns the total field ``u_ref + w`` with
    ``L w = -(L - L_ref) u_ref``.  ``reference_field(x1, x2, x1_imag, x2_imag)``
    evaluates ``u_ref`` (complex-stretched coordinates inside the absorbing
    layers) or is an array of cell-plus-face values.  With
    ``point_source`` the total field of ``L u = -delta_y`` is returned instead.
    """

    grid: Grid
    omega: float
    medium: object
    reference: object = None
    reference_field: object = None
    coeffs: TransmissionCoefficients | None = None
    reference_coeffs: TransmissionCoefficients | None = None
    k_plus: float | None = None
    point_source: tuple | None = None
    check_resolution: dict = field(default_factory=dict)


@dataclass
class DirectSolution:
    grid: Grid
    u: np.ndarray            # (n1, n2) total field at cell centres
    w: np.ndarray            # (n1, n2) part solved for (scattered or total)
    faces: np.ndarray | None
    residual: float
    stats: dict

    @property
    def x1(self):
        return self.grid.x1

    @property
    def x2(self):
        return self.grid.x2

    def interpolate(self, x1, x2, part="u"):
        """Bicubic spline interpolation of the cell values onto the tensor grid ``x1 x x2``."""
        data = self.u if part == "u" else self.w
        x1 = np.atleast_1d(np.asarray(x1, dtype=float))
        x2 = np.atleast_1d(np.asarray(x2, dtype=float))
        for xs, g in ((x1, self.x1), (x2, self.x2)):
            if xs.min() < g[0] or xs.max() > g[-1]:
                raise WindowOutsideGrid("interpolation points outside the cell-centre range")
        i = slice(max(0, np.searchsorted(self.x1, x1.min()) - 4), np.searchsorted(self.x1, x1.max()) + 4)
        j = slice(max(0, np.searchsorted(self.x2, x2.min()) - 4), np.searchsorted(self.x2, x2.max()) + 4)
        gx, gy, d = self.x1[i], self.x2[j], data[i, j]
        re = RectBivariateSpline(gx, gy, d.real, kx=3, ky=3)(x1, x2)
        im = RectBivariateSpline(gx, gy, d.imag, kx=3, ky=3)(x1, x2)
        return re + 1j * im


def estimated_factor_bytes(n_unknowns):
    """Rough size of the sparse LU factor of a 2D nine-point operator."""
    return 16.0 * n_unknowns * (6.0 * math.log2(max(n_unknowns, 2)) + 10.0)


def _available_bytes():
    try:
        return os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):
        return float("inf")


def _cell_points(grid: Grid):
    X1, X2 = np.meshgrid(grid.x1, grid.x2, indexing="ij")
    _, o1 = grid.stretch1(grid.x1)
    _, o2 = grid.stretch2(grid.x2)
    O1, O2 = np.meshgrid(o1, o2, indexing="ij")
    return X1, X2, O1, O2


def reference_vector(grid: Grid, field_fn):
    """``u_ref`` on cells (and on both sides of the interface faces)."""
    X1, X2, O1, O2 = _cell_points(grid)
    u = np.asarray(field_fn(X1, X2, O1, O2), dtype=complex).ravel()
    if not grid.interface:
        return u
    x1 = grid.x1
    _, o1 = grid.stretch1(x1)
    z = np.zeros_like(x1)
    up = np.asarray(field_fn(x1, z, o1, z, side=+1), dtype=complex)
    dn = np.asarray(field_fn(x1, z, o1, z, side=-1), dtype=complex)
    return np.concatenate([u, up, dn])


def direct_solve(problem: DirectProblem) -> DirectSolution:
    """Assemble, factorise (sparse LU) and solve; checks the discrete residual."""
    grid = problem.grid
    _check_resolution(problem)
    need = estimated_factor_bytes(grid.n_unknowns)
    avail = _available_bytes()
    if need > 0.8 * avail:
        raise FactorTooLarge(
            f"estimated factor {need / 2**30:.2f} GiB exceeds available memory {avail / 2**30:.2f} GiB; "
            "coarsen the grid or shrink the box")
    t0 = time.perf_counter()
    L = assemble_operator(grid, problem.medium, problem.omega, problem.coeffs, problem.k_plus)
    nc = grid.n1 * grid.n2
    if problem.point_source is not None:
        rhs = _point_source_rhs(grid, problem.point_source)
        uref = None
    else:
        if isinstance(problem.reference_field, np.ndarray):
            uref = problem.reference_field.ravel().astype(complex)
        else:
            uref = reference_vector(grid, problem.reference_field)
        Lref = assemble_operator(grid, problem.reference, problem.omega, problem.reference_coeffs,
                                 problem.k_plus)
        D = (L - Lref).tocsr()
        D.eliminate_zeros()
        rows = np.unique(D.nonzero()[0])
        rhs = np.zeros(grid.n_unknowns, dtype=complex)
        if rows.size:
            rhs[rows] = -(D[rows] @ uref)
    t1 = time.perf_counter()
    # diagonal pivoting keeps the fill-reducing ordering intact; partial
    # pivoting on these indefinite absorbing-layer matrices multiplies fill
    # and time by up to fifty, and the residual check below guards accuracy
    lu = spla.splu(L, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.1,
                   options={"SymmetricMode": True})
    w = lu.solve(rhs)
    t2 = time.perf_counter()
    r = L @ w - rhs
    nrm = max(np.linalg.norm(rhs), 1e-300)
    res = float(np.linalg.norm(r) / nrm)
    if res > RESIDUAL_LIMIT:
        w = w + lu.solve(-r)
        res = float(np.linalg.norm(L @ w - rhs) / nrm)
        if res > RESIDUAL_LIMIT:
            raise ResidualTooHigh(f"discrete residual {res:.3e} above {RESIDUAL_LIMIT}")
    cells = w[:nc].reshape(grid.n1, grid.n2)
    u = cells if uref is None else cells + uref[:nc].reshape(grid.n1, grid.n2)
    faces = w[nc:] if grid.interface else None
    stats = {"unknowns": grid.n_unknowns, "assembly_s": t1 - t0, "factor_solve_s": t2 - t1,
             "factor_nnz": int(lu.L.nnz + lu.U.nnz), "estimated_factor_bytes": need}
    return DirectSolution(grid, u, cells, faces, res, stats)


def _point_source_rhs(grid: Grid, y):
    """``-delta_y`` spread bilinearly over the four nearest cell centres
    (rows are cell-integrated, so the weights sum to ``-1``)."""
    rhs = np.zeros(grid.n_unknowns, dtype=complex)
    x1, x2 = grid.x1, grid.x2
    i = np.searchsorted(x1, y[0]) - 1
    j = np.searchsorted(x2, y[1]) - 1
    if not (0 <= i < grid.n1 - 1 and 0 <= j < grid.n2 - 1):
        raise ValueError("point source outside the grid")
    t = (y[0] - x1[i]) / (x1[i + 1] - x1[i])
    s = (y[1] - x2[j]) / (x2[j + 1] - x2[j])
    for di, wi in ((0, 1 - t), (1, t)):
        for dj, wj in ((0, 1 - s), (1, s)):
            rhs[(i + di) * grid.n2 + j + dj] -= wi * wj
    return rhs


def _check_resolution(problem: DirectProblem):
    """Points per local wavelength and per period, when the caller asks for it."""
    req = problem.check_resolution
    if not req:
        return
    grid = problem.grid
    hmax = max(grid.h1, grid.h2.max())
    k_max = req.get("k_max")
    if k_max and 2 * np.pi / k_max / hmax < req.get("per_wavelength", 20) - 1e-9:
        raise ValueError(f"grid has fewer than {req.get('per_wavelength', 20)} points per wavelength")
    xi = req.get("xi")
    if xi and xi / grid.h1 < req.get("per_period", 8) - 1e-9:
        raise ValueError("grid has fewer than 8 points per period of the micro-structure")


# --- reference fields ---------------------------------------------------------------------

def plane_wave_reference(k, theta):
    """``exp(i k theta . x_tilde)`` in complex-stretched coordinates."""
    k1, k2 = k * theta[0], k * theta[1]

    def fn(x1, x2, o1, o2, side=None):
        return np.exp(1j * (k1 * (x1 + 1j * o1) + k2 * (x2 + 1j * o2)))
    return fn


def layered_reference(background):
    """Two-half-space plane-wave solution (``BackgroundField``) as reference.

    Uses the complex-stretched coordinates inside absorbing layers; at
    ``x2 = 0`` ``side`` selects the upper or lower trace.
    """
    def fn(x1, x2, o1, o2, side=None):
        z1 = np.asarray(x1) + 1j * np.asarray(o1)
        z2 = np.asarray(x2) + 1j * np.asarray(o2)
        ph = np.exp(1j * background.k1 * z1)
        upper = np.exp(1j * background.beta_inc * z2) + background.R * np.exp(1j * background.beta_plus * z2)
        lower = background.T * np.exp(1j * background.beta_minus * z2)
        if side is None:
            is_up = np.asarray(x2) > 0
        else:
            is_up = np.full(np.shape(x2), side > 0)
        return background.amplitude * ph * np.where(is_up, upper, lower)
    return fn


# --- comparisons -------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    relative_l2: float
    relative_linf: float
    n_points: int

    def to_dict(self):
        return {"relative_l2": self.relative_l2, "relative_linf": self.relative_linf, "n_points": self.n_points}


def compare_fields(a, b, window=None, grid: Grid | None = None, collar=0.0):
    """Relative errors of ``b`` against ``a`` (normalised by ``a``).

    ``a`` and ``b`` are arrays on a common set of points, or
    :class:`DirectSolution`/callables to be sampled.  With ``grid`` the
    window must lie in its physical box and avoid a band of half-width
    ``collar`` around ``x2 = 0``.
    """
    if window is not None and grid is not None:
        x0, x1, y0, y1 = window
        p0, p1, q0, q1 = grid.physical_box()
        if x0 < p0 - 1e-12 or x1 > p1 + 1e-12 or y0 < q0 - 1e-12 or y1 > q1 + 1e-12:
            raise WindowOutsideGrid("window reaches into the absorbing layers or beyond the grid")
        if collar > 0 and y0 < collar and y1 > -collar:
            raise WindowOutsideGrid("window intersects the collar around the interface")
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("fields must be sampled on the same points")
    ok = np.isfinite(a) & np.isfinite(b)
    a, b = a[ok], b[ok]
    diff = b - a
    return ErrorReport(float(np.linalg.norm(diff) / np.linalg.norm(a)),
                       float(np.abs(diff).max() / np.abs(a).max()), int(a.size))


def richardson(coarse, fine, order=2.0):
    """Extrapolate two samplings of a field computed at ``h`` and ``h/2``."""
    return fine + (fine - coarse) / (2.0**order - 1.0)
