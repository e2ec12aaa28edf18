"""Inner loops with a numba implementation and a numpy twin.

The public functions dispatch on :func:`camoscat._accel.use_numba`.
"""
import numpy as np

from ._accel import njit, use_numba


# --- periodic divergence-form operator ------------------------------------

@njit
def _cell_operator_nb(u, ax, ay, inv_h1sq, inv_h2sq):
    n1, n2 = u.shape
    out = np.empty_like(u)
    for i in range(n1):
        ip = i + 1 if i + 1 < n1 else 0
        im = i - 1 if i > 0 else n1 - 1
        for j in range(n2):
            jp = j + 1 if j + 1 < n2 else 0
            jm = j - 1 if j > 0 else n2 - 1
            c = u[i, j]
            fx = ax[i, j] * (u[ip, j] - c) - ax[im, j] * (c - u[im, j])
            fy = ay[i, j] * (u[i, jp] - c) - ay[i, jm] * (c - u[i, jm])
            out[i, j] = fx * inv_h1sq + fy * inv_h2sq
    return out


def _cell_operator_np(u, ax, ay, inv_h1sq, inv_h2sq):
    fx = ax * (np.roll(u, -1, axis=0) - u)
    fy = ay * (np.roll(u, -1, axis=1) - u)
    return (fx - np.roll(fx, 1, axis=0)) * inv_h1sq + (fy - np.roll(fy, 1, axis=1)) * inv_h2sq


def cell_operator(u, ax, ay, h1, h2):
    """Apply ``div(a grad u)`` on a periodic cell-centred grid.

    ``ax[i, j]`` is the coefficient on the face between cells ``(i, j)`` and
    ``(i + 1, j)``; ``ay`` likewise along the second axis.
    """
    f = _cell_operator_nb if use_numba() else _cell_operator_np
    return f(u, ax, ay, 1.0 / h1**2, 1.0 / h2**2)


# --- polygon rasterisation --------------------------------------------------

@njit
def _points_in_polygon_nb(px, py, vx, vy):
    n = px.shape[0]
    m = vx.shape[0]
    inside = np.zeros(n, dtype=np.bool_)
    for p in range(n):
        x = px[p]
        y = py[p]
        c = False
        j = m - 1
        for i in range(m):
            yi = vy[i]
            yj = vy[j]
            if (yi > y) != (yj > y):
                xc = vx[i] + (y - yi) * (vx[j] - vx[i]) / (yj - yi)
                if x < xc:
                    c = not c
            j = i
        inside[p] = c
    return inside


def _points_in_polygon_np(px, py, vx, vy):
    inside = np.zeros(px.shape[0], dtype=bool)
    vxj = np.roll(vx, 1)
    vyj = np.roll(vy, 1)
    for xi, yi, xj, yj in zip(vx, vy, vxj, vyj):
        straddle = (yi > py) != (yj > py)
        if not straddle.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = xi + (py - yi) * (xj - xi) / (yj - yi)
        inside ^= straddle & (px < xc)
    return inside


def points_in_polygon(px, py, vx, vy):
    """Even-odd rule membership test for a closed polygon."""
    px = np.ascontiguousarray(px, dtype=float).ravel()
    py = np.ascontiguousarray(py, dtype=float).ravel()
    vx = np.ascontiguousarray(vx, dtype=float)
    vy = np.ascontiguousarray(vy, dtype=float)
    f = _points_in_polygon_nb if use_numba() else _points_in_polygon_np
    return f(px, py, vx, vy)


# --- self-intersection of a closed polyline ---------------------------------

@njit
def _first_crossing_nb(x, y):
    m = x.shape[0]
    for i in range(m):
        i2 = (i + 1) % m
        ax, ay, bx, by = x[i], y[i], x[i2], y[i2]
        for j in range(i + 2, m):
            j2 = (j + 1) % m
            if j2 == i:
                continue
            cx, cy, dx, dy = x[j], y[j], x[j2], y[j2]
            d1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            d2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
            d3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
            d4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
            if d1 * d2 < 0.0 and d3 * d4 < 0.0:
                return i
    return -1


def _first_crossing_np(x, y):
    m = x.shape[0]
    ax, ay = x, y
    bx, by = np.roll(x, -1), np.roll(y, -1)
    for i in range(m):
        j = np.arange(i + 2, m)
        j = j[(j + 1) % m != i]
        if j.size == 0:
            continue
        cx, cy, dx, dy = ax[j], ay[j], bx[j], by[j]
        d1 = (bx[i] - ax[i]) * (cy - ay[i]) - (by[i] - ay[i]) * (cx - ax[i])
        d2 = (bx[i] - ax[i]) * (dy - ay[i]) - (by[i] - ay[i]) * (dx - ax[i])
        d3 = (dx - cx) * (ay[i] - cy) - (dy - cy) * (ax[i] - cx)
        d4 = (dx - cx) * (by[i] - cy) - (dy - cy) * (bx[i] - cx)
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return i
    return -1


def polyline_is_simple(x, y):
    """True when no two non-adjacent segments of the closed polyline cross."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    f = _first_crossing_nb if use_numba() else _first_crossing_np
    return f(x, y) < 0
