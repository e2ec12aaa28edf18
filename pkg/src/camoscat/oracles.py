"""Independent closed-form references used by the tests and the validation scenarios."""
from __future__ import annotations

import numpy as np
from scipy import special


def laminate_tensor(mu_values, fractions):
    """Effective tensor of a horizontally layered cell (layers stacked in ``y2``).

    Along the layers the conductivities ``1/mu`` average arithmetically,
    across them the resistivities ``mu`` average.
    """
    mu = np.asarray(mu_values, dtype=float)
    w = np.asarray(fractions, dtype=float)
    w = w / w.sum()
    return np.diag([np.sum(w / mu), 1.0 / np.sum(w * mu)])


def flat_strip_corrector(h, mu_plus, mu_cl, y2):
    """Two-component corrector of a flat layer ``0 < y2 < h``.

    The 1D problem ``(a Psi')' = c nu2 (delta_h + delta_0)`` with
    ``c = 1/mu_cl - 1/mu_plus`` and outward layer normals ``nu2 = +1`` at
    ``h`` and ``-1`` at 0 has zero flux outside the layer and flux ``-c``
    inside, so ``Psi2 = -c mu_cl clip(y2, 0, h)`` and ``Psi1 = 0``.
    """
    c = 1.0 / mu_cl - 1.0 / mu_plus
    y2 = np.asarray(y2, dtype=float)
    return np.zeros_like(y2), -c * mu_cl * np.clip(y2, 0.0, h)


def fresnel_reflection(k1, omega, mu_up, eps_up, mu_down, eps_down):
    """Reflection coefficient of a downgoing wave at a plain two-media interface.

    ``exp(i k1 x1 - i beta x2) + R exp(i k1 x1 + i beta x2)`` above and
    ``T exp(i k1 x1 - i beta' x2)`` below; continuity of ``u`` and of
    ``(1/mu) d2 u`` gives ``R = (beta/mu_up - beta'/mu_down) / (beta/mu_up + beta'/mu_down)``.
    """
    beta = np.sqrt(complex(omega**2 * eps_up * mu_up - k1 * k1))
    beta_t = np.sqrt(complex(omega**2 * eps_down * mu_down - k1 * k1))
    return (beta / mu_up - beta_t / mu_down) / (beta / mu_up + beta_t / mu_down)


def _series_coefficients(radius, omega, mu, eps, mu_in, eps_in, m):
    k0 = omega * np.sqrt(eps * mu)
    k1 = omega * np.sqrt(eps_in * mu_in)
    a0, a1 = k0 * radius, k1 * radius
    J0, dJ0 = special.jv(m, a0), special.jvp(m, a0)
    H0, dH0 = special.hankel1(m, a0), special.h1vp(m, a0)
    J1, dJ1 = special.jv(m, a1), special.jvp(m, a1)
    inc = 1j ** m
    # [H0, -J1; (k0/mu) dH0, -(k1/mu_in) dJ1] [b, c] = -inc [J0, (k0/mu) dJ0]
    det = H0 * (-(k1 / mu_in) * dJ1) + J1 * (k0 / mu) * dH0
    r1 = -inc * J0
    r2 = -inc * (k0 / mu) * dJ0
    b = (r1 * (-(k1 / mu_in) * dJ1) + J1 * r2) / det
    c = (H0 * r2 - (k0 / mu) * dH0 * r1) / det
    return k0, k1, b, c


def penetrable_cylinder(x1, x2, radius, omega, mu, eps, mu_in, eps_in, angle_inc, center=(0.0, 0.0), n_terms=None):
    """Total field of a plane wave ``exp(i k (cos a, sin a) . x)`` hitting a
    penetrable circular cylinder, by the cylindrical-harmonics series."""
    x1 = np.asarray(x1, dtype=float) - center[0]
    x2 = np.asarray(x2, dtype=float) - center[1]
    r = np.hypot(x1, x2)
    phi = np.arctan2(x2, x1)
    k_big = omega * np.sqrt(max(eps * mu, eps_in * mu_in))
    if n_terms is None:
        n_terms = int(k_big * max(radius, r.max()) + 30)
    m = np.arange(-n_terms, n_terms + 1)
    k0, k1, b, c = _series_coefficients(radius, omega, mu, eps, mu_in, eps_in, m)
    ang = np.exp(1j * np.multiply.outer(phi - angle_inc, m))
    out = np.empty(r.shape, dtype=complex)
    inside = r < radius
    ri, ro = r[inside], r[~inside]
    out[inside] = np.sum(c * special.jv(m, (k1 * ri)[:, None]) * ang[inside], axis=-1)
    incident = np.exp(1j * k0 * ro * np.cos(phi[~inside] - angle_inc))
    scat = np.sum(b * special.hankel1(m, (k0 * ro)[:, None]) * ang[~inside], axis=-1)
    out[~inside] = incident + scat
    return out
