"""Adaptive Gauss-Kronrod (7/15) panels for vector-valued integrands, and
the logarithmic quadrature weights used on closed curves."""
import numpy as np

from .errors import QuadratureFailure

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])            # 15 points on [-1, 1]
W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
W_GAUSS = np.zeros(15)
_gauss_pos = [1, 3, 5]
for k, w in zip(_gauss_pos, _WG[:3]):
    W_GAUSS[k] = w
    W_GAUSS[14 - k] = w
W_GAUSS[7] = _WG[3]


def panel_rule(panels):
    """Flattened nodes and Kronrod / Gauss weights for a list of panels."""
    panels = np.asarray(panels, dtype=float).reshape(-1, 2)
    mid = 0.5 * (panels[:, 0] + panels[:, 1])
    half = 0.5 * (panels[:, 1] - panels[:, 0])
    t = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    wk = (half[:, None] * W_KRONROD[None, :]).ravel()
    wg = (half[:, None] * W_GAUSS[None, :]).ravel()
    return t, wk, wg


def adaptive_gk15(func, breaks, tol, max_panels=20000):
    """Integrate ``func`` over ``[breaks[0], breaks[-1]]``.

    ``func`` maps an array of ``n`` abscissae to an ``(n, m)`` array.  ``tol``
    is an absolute tolerance, scalar or per component.  Panels are bisected
    until the summed Kronrod-Gauss differences satisfy the tolerance.

    Returns ``(value, error, panels)``.
    """
    breaks = np.asarray(breaks, dtype=float)
    panels = np.column_stack([breaks[:-1], breaks[1:]])
    tol = np.atleast_1d(np.asarray(tol, dtype=float))

    def evaluate(pan):
        t, _, _ = panel_rule(pan)
        f = np.asarray(func(t))
        f = f.reshape(len(pan), 15, -1)
        half = 0.5 * (pan[:, 1] - pan[:, 0])
        k = np.einsum("pqm,q->pm", f, W_KRONROD) * half[:, None]
        g = np.einsum("pqm,q->pm", f, W_GAUSS) * half[:, None]
        return k, np.abs(k - g)

    vals, errs = evaluate(panels)
    while True:
        err = errs.sum(axis=0)
        if np.all(err <= tol):
            return vals.sum(axis=0), err, panels
        score = (errs / tol[None, :]).max(axis=1)
        if len(panels) >= max_panels:
            raise QuadratureFailure("adaptive quadrature exhausted its panel budget",
                                    value=vals.sum(axis=0), error=err)
        # bisect every panel carrying more than its share of the budget
        share = 1.0 / len(panels)
        split = score > 0.5 * share
        if not split.any():
            split = score >= score.max()
        keep = ~split
        a, b = panels[split, 0], panels[split, 1]
        m = 0.5 * (a + b)
        new = np.vstack([np.column_stack([a, m]), np.column_stack([m, b])])
        nv, ne = evaluate(new)
        panels = np.vstack([panels[keep], new])
        vals = np.vstack([vals[keep], nv])
        errs = np.vstack([errs[keep], ne])
        order = np.argsort(panels[:, 0], kind="stable")
        panels, vals, errs = panels[order], vals[order], errs[order]


def kress_weights(n_nodes):
    """Weights ``R_j`` of the product rule for
    ``int_0^{2pi} log(4 sin^2((t - s)/2)) g(s) ds`` at equispaced nodes.

    Returns the circulant first row ``R(t_0 - t_j)``.
    """
    if n_nodes % 2:
        raise ValueError("number of nodes must be even")
    n = n_nodes // 2
    t = 2 * np.pi * np.arange(n_nodes) / n_nodes
    m = np.arange(1, n)
    row = -(2 * np.pi / n) * (np.cos(np.outer(t, m)) / m).sum(axis=1) - (np.pi / n**2) * np.cos(n * t)
    return row


def kress_matrix(n_nodes):
    row = kress_weights(n_nodes)
    idx = (np.arange(n_nodes)[:, None] - np.arange(n_nodes)[None, :]) % n_nodes
    return row[idx]
