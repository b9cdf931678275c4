"""Pure-numpy staircase cascade: ordered product of constant-potential
(psi, psi') transfer matrices, vectorized over energy.

Matches `_cascade.cascade_chain` bit-for-bit in structure: same rescaling
cadence, same small-argument series, so the two backends agree to rounding.
"""

import numpy as np

_RESCALE_EVERY = 32
_RESCALE_ABOVE = 1e100
_SERIES_BELOW = 1e-6


def _cos_sinc(x, width):
    """cos(k w) and sin(k w)/k for x = k^2 w^2 (entire functions of x)."""
    x = np.asarray(x)
    c = np.empty_like(x)
    s = np.empty_like(x)
    small = np.abs(x) < _SERIES_BELOW
    osc = (x >= 0) & ~small
    eva = (x < 0) & ~small
    r = np.sqrt(x[osc])
    c[osc] = np.cos(r)
    s[osc] = width * np.sin(r) / r
    q = np.sqrt(-x[eva])
    c[eva] = np.cosh(q)
    s[eva] = width * np.sinh(q) / q
    xs = x[small]
    c[small] = 1.0 - xs / 2.0 + xs**2 / 24.0
    s[small] = width * (1.0 - xs / 6.0 + xs**2 / 120.0)
    return c, s


def cascade_chain(energies, v_steps, width, kinetic_coeff):
    """Accumulate the staircase transfer matrix for every energy.

    Parameters
    ----------
    energies : (nE,) float array, total energies
    v_steps : (ns,) float array, potential at the step midpoints, left to right
    width : float, step width
    kinetic_coeff : float, hbar^2 / (2 m)

    Returns
    -------
    m : (nE, 2, 2) float array, rescaled transfer matrices
    log_scale : (nE,) float array, ln of the factor divided out per energy
    """
    energies = np.ascontiguousarray(energies, dtype=float)
    v_steps = np.ascontiguousarray(v_steps, dtype=float)
    ne = energies.size
    m11 = np.ones(ne)
    m22 = np.ones(ne)
    m12 = np.zeros(ne)
    m21 = np.zeros(ne)
    log_scale = np.zeros(ne)
    w2_over_b = width * width / kinetic_coeff
    for i, v in enumerate(v_steps):
        x = (energies - v) * w2_over_b
        c, s = _cos_sinc(x, width)
        ks = x / (width * width) * s  # k^2 * sin(kw)/k
        n11 = c * m11 + s * m21
        n12 = c * m12 + s * m22
        n21 = -ks * m11 + c * m21
        n22 = -ks * m12 + c * m22
        m11, m12, m21, m22 = n11, n12, n21, n22
        if (i + 1) % _RESCALE_EVERY == 0:
            mx = np.maximum(
                np.maximum(np.abs(m11), np.abs(m12)),
                np.maximum(np.abs(m21), np.abs(m22)),
            )
            big = mx > _RESCALE_ABOVE
            if np.any(big):
                f = np.where(big, mx, 1.0)
                m11 /= f
                m12 /= f
                m21 /= f
                m22 /= f
                log_scale += np.where(big, np.log(mx), 0.0)
    out = np.empty((ne, 2, 2))
    out[:, 0, 0] = m11
    out[:, 0, 1] = m12
    out[:, 1, 0] = m21
    out[:, 1, 1] = m22
    return out, log_scale
