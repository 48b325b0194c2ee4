"""Pure-numpy versions of the compiled kernels."""

import numpy as np


def chi3_average(o1, o2, o3, vel, wts, k1, k2, k3, widths, pops, sign2):
    """Weighted velocity sum of the four-wave-mixing susceptibility.

    ``widths`` = (Γ_ml, Γ_gm, Γ_ng, Γ_mn, Γ_ln, Γ_lg);
    ``pops`` = (n_g-n_n, n_m-n_n, n_g-n_l).
    """
    gml, ggm, gng, gmn, gln, glg = widths
    dgn, dmn, dgl = pops
    o1 = np.asarray(o1, dtype=float)[:, None]
    o2 = np.asarray(o2, dtype=float)[:, None]
    o3 = np.asarray(o3, dtype=float)[:, None]
    v = np.asarray(vel, dtype=float)[None, :]
    a = o1 - k1 * v
    b = sign2 * (o2 - k2 * v)
    c = o3 - k3 * v
    e = dgn / (gng - 1j * b)
    t = (e + dmn / (gmn + 1j * c)) / (ggm + 1j * (c - b))
    t = t + (e + dgl / (glg + 1j * a)) / (gln + 1j * (a - b))
    return (1j * t / (gml + 1j * (a - b + c))) @ np.asarray(wts, dtype=float)


def pv_trapezoid(x, h, x0, h0, limit):
    """Trapezoid sum of (h - h0)/(x0 - x); ``limit`` is used where x == x0."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    if x.size < 2:
        return 0.0
    at_pole = x == x0
    diff = np.where(at_pole, 1.0, x0 - x)
    y = np.where(at_pole, limit, (h - h0) / diff)
    return float(np.sum(0.5 * np.diff(x) * (y[1:] + y[:-1])))
