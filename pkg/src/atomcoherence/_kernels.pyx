# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Semantics match ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def chi3_average(double[:] o1, double[:] o2, double[:] o3, double[:] vel,
                 double[:] wts, double k1, double k2, double k3,
                 double[:] widths, double[:] pops, double sign2):
    """Weighted velocity sum of the four-wave-mixing susceptibility.

    ``widths`` = (Γ_ml, Γ_gm, Γ_ng, Γ_mn, Γ_ln, Γ_lg);
    ``pops`` = (n_g-n_n, n_m-n_n, n_g-n_l).
    """
    cdef Py_ssize_t ns = o1.shape[0], nv = vel.shape[0], i, j
    cdef double gml = widths[0], ggm = widths[1], gng = widths[2]
    cdef double gmn = widths[3], gln = widths[4], glg = widths[5]
    cdef double dgn = pops[0], dmn = pops[1], dgl = pops[2]
    cdef double complex I = 1j
    cdef double complex e, t, acc
    cdef double a, b, c, v
    out = np.empty(ns, dtype=np.complex128)
    cdef double complex[:] res = out
    with nogil:
        for i in range(ns):
            acc = 0
            for j in range(nv):
                v = vel[j]
                a = o1[i] - k1 * v
                b = sign2 * (o2[i] - k2 * v)
                c = o3[i] - k3 * v
                e = dgn / (gng - I * b)
                t = (e + dmn / (gmn + I * c)) / (ggm + I * (c - b))
                t = t + (e + dgl / (glg + I * a)) / (gln + I * (a - b))
                acc = acc + wts[j] * I * t / (gml + I * (a - b + c))
            res[i] = acc
    return out


def pv_trapezoid(double[:] x, double[:] h, double x0, double h0, double limit):
    """Trapezoid sum of (h - h0)/(x0 - x); ``limit`` is used where x == x0."""
    cdef Py_ssize_t n = x.shape[0], i
    cdef double prev, cur, total = 0.0
    if n < 2:
        return 0.0
    prev = limit if x[0] == x0 else (h[0] - h0) / (x0 - x[0])
    for i in range(1, n):
        cur = limit if x[i] == x0 else (h[i] - h0) / (x0 - x[i])
        total += 0.5 * (x[i] - x[i - 1]) * (prev + cur)
        prev = cur
    return total
