# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled staircase cascade: the hot inner loop of the transmission
spectrum.  Semantics identical to cascade_np.cascade_chain."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, cosh, fabs, log, sin, sinh, sqrt

cnp.import_array()

cdef double RESCALE_ABOVE = 1e100
cdef double SERIES_BELOW = 1e-6
cdef int RESCALE_EVERY = 32


def cascade_chain(double[::1] energies, double[::1] v_steps, double width,
                  double kinetic_coeff):
    cdef Py_ssize_t ne = energies.shape[0]
    cdef Py_ssize_t ns = v_steps.shape[0]
    out_arr = np.empty((ne, 2, 2), dtype=np.float64)
    scale_arr = np.zeros(ne, dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double[::1] log_scale = scale_arr
    cdef double w2_over_b = width * width / kinetic_coeff
    cdef double inv_w2 = 1.0 / (width * width)
    cdef Py_ssize_t ie, i
    cdef double m11, m12, m21, m22, n11, n12, n21, n22
    cdef double x, r, c, s, ks, mx, e

    for ie in range(ne):
        e = energies[ie]
        m11 = 1.0
        m12 = 0.0
        m21 = 0.0
        m22 = 1.0
        for i in range(ns):
            x = (e - v_steps[i]) * w2_over_b
            if fabs(x) < SERIES_BELOW:
                c = 1.0 - x / 2.0 + x * x / 24.0
                s = width * (1.0 - x / 6.0 + x * x / 120.0)
            elif x > 0.0:
                r = sqrt(x)
                c = cos(r)
                s = width * sin(r) / r
            else:
                r = sqrt(-x)
                c = cosh(r)
                s = width * sinh(r) / r
            ks = x * inv_w2 * s
            n11 = c * m11 + s * m21
            n12 = c * m12 + s * m22
            n21 = -ks * m11 + c * m21
            n22 = -ks * m12 + c * m22
            m11 = n11
            m12 = n12
            m21 = n21
            m22 = n22
            if (i + 1) % RESCALE_EVERY == 0:
                mx = fabs(m11)
                if fabs(m12) > mx:
                    mx = fabs(m12)
                if fabs(m21) > mx:
                    mx = fabs(m21)
                if fabs(m22) > mx:
                    mx = fabs(m22)
                if mx > RESCALE_ABOVE:
                    m11 /= mx
                    m12 /= mx
                    m21 /= mx
                    m22 /= mx
                    log_scale[ie] += log(mx)
        out[ie, 0, 0] = m11
        out[ie, 0, 1] = m12
        out[ie, 1, 0] = m21
        out[ie, 1, 1] = m22
    return out_arr, scale_arr
