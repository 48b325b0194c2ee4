"""Laser-induced continuum structures.

Three bound levels ``g``, ``n`` and ``l`` couple to a common continuum
(and, off resonance, to further discrete levels ``k``). Their widths
``γ_ij`` and shifts ``δ_ij`` at the generated frequency ``ω_μ`` set the
Fano parameters ``q_ij = δ_ij/γ_ij``, which shape the nonlinear
susceptibility and the absorption at ``ω_1`` and ``ω_μ``.

Units: ħ = 1, so energies and matrix elements are in rad/s. Bound-free
matrix elements ``G_iε`` carry units of ``(rad/s)^{1/2}`` so that
``π G_i G_j`` is a rate.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import (PVNotConverged, SingularDenominator, ValidationError,
                     ZeroWidth)

BOUND = ("g", "n", "l")
_IDX = {name: i for i, name in enumerate(BOUND)}


# -- continuum models ------------------------------------------------------

@dataclass(frozen=True)
class FlatContinuum:
    """Constant matrix element ``amplitude`` on ``[lo, hi]``, zero outside."""

    amplitude: float
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValidationError("flat continuum needs hi > lo")

    @property
    def support(self) -> Tuple[float, float]:
        return self.lo, self.hi

    def __call__(self, eps):
        eps = np.asarray(eps, dtype=float)
        inside = (eps >= self.lo) & (eps <= self.hi)
        return np.where(inside, self.amplitude, 0.0)


@dataclass(frozen=True)
class LorentzianContinuum:
    """Matrix element ``a / sqrt(1 + ((ε-c)/w)²)``; ``G_iG_j`` is Lorentzian.

    The support is truncated at ``c ± span·w``.
    """

    amplitude: float
    center: float
    width: float
    span: float = 10.0

    def __post_init__(self):
        if self.width <= 0 or self.span <= 0:
            raise ValidationError("Lorentzian continuum needs positive width and span")

    @property
    def support(self) -> Tuple[float, float]:
        return self.center - self.span * self.width, self.center + self.span * self.width

    def __call__(self, eps):
        eps = np.asarray(eps, dtype=float)
        lo, hi = self.support
        val = self.amplitude / np.sqrt(1 + ((eps - self.center) / self.width) ** 2)
        return np.where((eps >= lo) & (eps <= hi), val, 0.0)


@dataclass(frozen=True)
class TabulatedContinuum:
    """Cubic-spline interpolation of tabulated ``(energy, G)`` pairs."""

    energies: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if e.ndim != 1 or e.size < 4 or e.size != len(self.values) or np.any(np.diff(e) <= 0):
            raise ValidationError("tabulated continuum needs >= 4 strictly increasing energies")
        object.__setattr__(self, "energies", tuple(float(x) for x in e))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))

    @property
    def support(self) -> Tuple[float, float]:
        return self.energies[0], self.energies[-1]

    @functools.cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.energies, self.values)

    def __call__(self, eps):
        eps = np.asarray(eps, dtype=float)
        lo, hi = self.support
        return np.where((eps >= lo) & (eps <= hi), self._spline(np.clip(eps, lo, hi)), 0.0)


@dataclass(frozen=True)
class DiscreteLevel:
    """Off-resonant discrete level ``k``.

    ``couplings`` are ``(G_gk, G_nk, G_lk)``; ``p`` is the complex
    denominator ``p_gk``.
    """

    couplings: Tuple[float, float, float]
    p: complex

    def __post_init__(self):
        if len(self.couplings) != 3:
            raise ValidationError("discrete level needs three couplings (g, n, l)")
        if self.p == 0:
            raise SingularDenominator("discrete denominator p_gk is zero")


@dataclass(frozen=True)
class ContinuumCoupling:
    """Bound-free and bound-bound couplings of levels g, n, l.

    Parameters
    ----------
    continua : tuple
        One continuum model per bound level, in the order ``(g, n, l)``.
        ``None`` marks a level without continuum coupling.
    discrete : tuple of DiscreteLevel
    k_override : tuple of four floats, optional
        Degeneracy factors ``k_1..k_4``; derived from ``γ`` when omitted.
    pv_points : int
        Initial number of PV grid points (odd).
    pv_tol : float
        Relative change allowed under grid doubling.
    """

    continua: Tuple[object, object, object]
    discrete: Tuple[DiscreteLevel, ...] = ()
    k_override: Optional[Tuple[float, float, float, float]] = None
    pv_points: int = 2001
    pv_tol: float = 1e-4

    def __post_init__(self):
        if len(self.continua) != 3:
            raise ValidationError("continua must list models for g, n, l")
        if self.k_override is not None:
            k = tuple(float(v) for v in self.k_override)
            if len(k) != 4 or any(not 0 <= v <= 1 for v in k):
                raise ValidationError("k_override needs four values in [0, 1]")
            object.__setattr__(self, "k_override", k)


# -- principal value ------------------------------------------------------

def _pv_grid(x0: float, a: float, b: float, n: int) -> np.ndarray:
    m = max((n - 1) // 2, 2)
    dmin = (b - a) * 1e-9
    left = x0 - np.geomspace(dmin, x0 - a, m)[::-1] if x0 - a > dmin else np.array([a])
    right = x0 + np.geomspace(dmin, b - x0, m) if b - x0 > dmin else np.array([b])
    left[0] = a
    right[-1] = b
    return np.concatenate([left, [x0], right])


def _pv_once(func, x0: float, a: float, b: float, n: int) -> Tuple[float, float]:
    if not a < x0 < b:
        x = np.linspace(a, b, n)
        h = func(x)
        return float(np.trapezoid(h / (x0 - x), x)), float(np.max(np.abs(h)))
    x = _pv_grid(x0, a, b, n)
    h = func(x)
    h0 = float(func(np.array([x0]))[0])
    e = 1e-6 * min(x0 - a, b - x0)
    slope = float((func(np.array([x0 + e]))[0] - func(np.array([x0 - e]))[0]) / (2 * e))
    body = kernels.pv_trapezoid(x, np.ascontiguousarray(h, dtype=float), x0, h0, -slope)
    return body + h0 * np.log((x0 - a) / (b - x0)), float(np.max(np.abs(h)))


def principal_value(func, x0: float, a: float, b: float, *, points: int = 2001,
                    tol: float = 1e-4, max_doublings: int = 6) -> float:
    """``PV ∫_a^b h(ε)/(x0 - ε) dε`` by subtracting the pole.

    The integrand ``(h - h(x0))/(x0 - ε)`` is regular and is integrated on
    a grid clustered geometrically around ``x0``; the subtracted part gives
    ``h(x0) ln((x0-a)/(b-x0))``. The grid is doubled until two successive
    results agree to ``tol`` relative to ``max(|result|, max|h|)``.
    """
    if not b > a:
        return 0.0
    n = points | 1
    prev, _ = _pv_once(func, x0, a, b, n)
    for _ in range(max_doublings):
        n = 2 * n - 1
        cur, hmax = _pv_once(func, x0, a, b, n)
        if abs(cur - prev) <= tol * max(abs(cur), hmax, 1e-300):
            return cur
        prev = cur
    raise PVNotConverged(f"principal value not converged after {max_doublings} doublings")


# -- coupling matrices ----------------------------------------------------

@dataclass(frozen=True)
class CouplingMatrices:
    """Widths ``γ_ij`` and shifts ``δ_ij`` (order g, n, l) plus ``k_1..k_4``."""

    gamma: np.ndarray
    delta: np.ndarray
    k: Tuple[float, float, float, float] = field(default=None)

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float).reshape(3, 3)
        d = np.array(self.delta, dtype=float).reshape(3, 3)
        if np.any(np.diag(g) < 0):
            raise ValidationError("diagonal widths γ_ii must be non-negative")
        g.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "delta", d)
        if self.k is None:
            object.__setattr__(self, "k", degeneracy_factors(g))

    def __iter__(self):
        yield self.gamma
        yield self.delta
        yield self.q_matrix

    def width(self, i: str, j: str) -> float:
        return float(self.gamma[_IDX[i], _IDX[j]])

    def shift(self, i: str, j: str) -> float:
        return float(self.delta[_IDX[i], _IDX[j]])

    def q(self, i: str, j: str) -> float:
        """Fano parameter ``q_ij = δ_ij/γ_ij``."""
        g = self.width(i, j)
        if g == 0:
            raise ZeroWidth(f"γ_{i}{j} = 0, q_{i}{j} undefined")
        return self.shift(i, j) / g

    @property
    def q_matrix(self) -> np.ndarray:
        """All ``q_ij``; ``nan`` where ``γ_ij = 0``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.gamma != 0, self.delta / np.where(self.gamma != 0, self.gamma, 1), np.nan)


def degeneracy_factors(gamma) -> Tuple[float, float, float, float]:
    """``k_1..k_4`` from the width matrix, clipped to ``[0, 1]``.

    ``k_1 = γ_gl γ_ln/(γ_gn γ_ll)``, ``k_2 = γ_nl γ_ln/(γ_ll γ_nn)``,
    ``k_3 = γ_gl γ_lg/(γ_gg γ_ll)``, ``k_4 = γ_gn γ_ng/(γ_gg γ_nn)``.
    A factor with a vanishing denominator is set to zero. All four equal
    one for a single nondegenerate continuum.
    """
    g = np.asarray(gamma, dtype=float)
    G, N, L = 0, 1, 2
    pairs = [(g[G, L] * g[L, N], g[G, N] * g[L, L]),
             (g[N, L] * g[L, N], g[L, L] * g[N, N]),
             (g[G, L] * g[L, G], g[G, G] * g[L, L]),
             (g[G, N] * g[N, G], g[G, G] * g[N, N])]
    return tuple(float(np.clip(num / den, 0.0, 1.0)) if den != 0 else 0.0 for num, den in pairs)


@functools.lru_cache(maxsize=256)
def _derive_cached(cc: ContinuumCoupling, omega_mu: float) -> CouplingMatrices:
    gamma = np.zeros((3, 3))
    delta = np.zeros((3, 3))
    models = cc.continua
    for i in range(3):
        for j in range(i, 3):
            mi, mj = models[i], models[j]
            if mi is not None and mj is not None:
                a = max(mi.support[0], mj.support[0])
                b = min(mi.support[1], mj.support[1])
                if b > a:
                    prod = (lambda e, mi=mi, mj=mj: mi(e) * mj(e))
                    if a <= omega_mu <= b:
                        gamma[i, j] = np.pi * float(prod(np.array([omega_mu]))[0])
                    delta[i, j] = principal_value(prod, omega_mu, a, b,
                                                  points=cc.pv_points, tol=cc.pv_tol)
            s = sum(lev.couplings[i] * lev.couplings[j] / lev.p for lev in cc.discrete)
            gamma[i, j] += float(np.real(s))
            delta[i, j] += float(np.imag(s))
            gamma[j, i], delta[j, i] = gamma[i, j], delta[i, j]
    return CouplingMatrices(gamma, delta, cc.k_override)


def derive_couplings(cc: ContinuumCoupling, omega_mu: float) -> CouplingMatrices:
    """Widths, shifts and Fano parameters at ``ε = ω_μ``.

    ``γ_ij = π G_i(ω_μ) G_j(ω_μ) + Re Σ_k G_ik G_kj/p_gk`` and
    ``δ_ij = PV ∫ G_i G_j/(ω_μ - ε) dε + Im Σ_k G_ik G_kj/p_gk``.
    Results are cached per ``(cc, ω_μ)``; iterate the returned object to
    unpack ``(γ, δ, q)``.
    """
    return _derive_cached(cc, float(omega_mu))


# -- spectra --------------------------------------------------------------

@dataclass(frozen=True)
class LicsParams:
    """Discrete widths and the strong bound-bound field.

    Parameters
    ----------
    width_gm, width_gn, width_gl : float
        Halfwidths ``Γ_gm``, ``Γ_gn``, ``Γ_gl`` of the bound transitions.
    rabi_mn : complex
        Rabi frequency of the strong field on m-n.
    x_term : {"saturation", "printed"}
        Reading of the m-n dressing term in ``X`` and ``Y``:
        ``g_mn/(D_gm(1+g_nn))`` or ``q_mn/(D_gm(1+q_nn))``.
    q_mn : float, optional
        Needed only by the ``"printed"`` reading.
    """

    width_gm: float
    width_gn: float
    width_gl: float
    rabi_mn: complex = 0.0
    x_term: str = "saturation"
    q_mn: Optional[float] = None

    def __post_init__(self):
        if min(self.width_gm, self.width_gn, self.width_gl) <= 0:
            raise ValidationError("LICS widths must be positive")
        if self.x_term not in ("saturation", "printed"):
            raise ValidationError("x_term must be 'saturation' or 'printed'")
        if self.x_term == "printed" and self.q_mn is None:
            raise ValidationError("x_term='printed' needs q_mn")

    @property
    def g_mn(self) -> float:
        return abs(self.rabi_mn) ** 2 / (self.width_gm * self.width_gn)


@dataclass(frozen=True)
class LicsSpectrum:
    """Normalized LICS outputs over a scan grid."""

    grid: np.ndarray
    x_l: np.ndarray
    x_n: np.ndarray
    y_l: np.ndarray
    y_n: np.ndarray
    K: np.ndarray
    A: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    chi3: np.ndarray
    alpha1: np.ndarray
    alpha_mu: np.ndarray


def fano_term(y, q: float):
    """``(y + q)²/(1 + y²)``: zero at ``y = -q``, maximum ``1+q²`` at ``y = 1/q``."""
    y = np.asarray(y, dtype=float)
    return (y + q) ** 2 / (1 + y ** 2)


SCANS = ("omega1", "delta1", "delta2", "delta_l", "eta")


def lics_spectra(couplings: CouplingMatrices, params: LicsParams, grid: Sequence[float], *,
                 scan: str = "omega1", delta1: float = 0.0, delta2: float = 0.0,
                 delta_l: float = 0.0, eta: float = 0.0) -> LicsSpectrum:
    """Evaluate ``χ⁽³⁾``, ``α(ω_1)`` and ``α(ω_μ)`` normalized to their bare values.

    Parameters
    ----------
    couplings : CouplingMatrices
        From :func:`derive_couplings` (evaluated at the scan centre) or
        built directly.
    grid : array_like
        Scan values (rad/s) for the variable named by ``scan``.
    scan : str
        ``"omega1"`` shifts ``delta1``, ``delta2`` and ``delta_l`` together
        (a scan of ``ω_1``); the other names scan a single variable.
    delta1, delta2, delta_l : float
        ``ω_1-ω_gm``, ``ω_1+ω_2-ω_gn`` and ``ω_1+ω_2+ω_3-ω-ω_gl``.
    eta : float
        ``ω_μ - (ω_1+ω_2+ω_3)``: offset of an independent probe at ``ω_μ``;
        zero for the generated wave, where ``y = x`` and ``Y = X``.
    """
    if scan not in SCANS:
        raise ValidationError(f"scan must be one of {SCANS}")
    grid = np.asarray(grid, dtype=float)
    d = {"delta1": delta1, "delta2": delta2, "delta_l": delta_l, "eta": eta}
    if scan == "omega1":
        for name in ("delta1", "delta2", "delta_l"):
            d[name] = d[name] + grid
    else:
        d[scan] = d[scan] + grid
    d = {k: np.broadcast_to(np.asarray(v, dtype=float), grid.shape) for k, v in d.items()}

    c = couplings
    k1, k2, k3, k4 = c.k
    g_ll = c.width("l", "l") / params.width_gl
    g_nn = c.width("n", "n") / params.width_gn
    beta_l = g_ll / (1 + g_ll)
    beta_n = g_nn / (1 + g_nn)
    wl = params.width_gl + c.width("l", "l")
    wn = params.width_gn + c.width("n", "n")

    x_l = (d["delta_l"] - c.shift("l", "l")) / wl
    x_n = (d["delta2"] - c.shift("n", "n")) / wn
    y_l = x_l + d["eta"] / wl
    y_n = x_n + d["eta"] / wn
    d_gm = 1 + 1j * d["delta1"] / params.width_gm
    p_gm = 1 + 1j * (d["delta1"] + d["eta"]) / params.width_gm

    def q(i, j):
        return c.q(i, j) if c.width(i, j) != 0 else 0.0

    if params.x_term == "saturation":
        dress = params.g_mn / (1 + g_nn)
    else:
        dress = params.q_mn / (1 + c.q("n", "n"))

    # Interference terms vanish with beta_l; q is only needed when they do not.
    if beta_l > 0 and k1 > 0:
        K = 1 - k1 * beta_l * (1 - 1j * q("n", "l")) * (1 - 1j * q("l", "g")) / (
            (1 - 1j * q("n", "g")) * (1 + 1j * x_l))
        A = 1 - k1 * beta_l * (1 - 1j * q("l", "n")) * (1 - 1j * q("g", "l")) / (
            (1 - 1j * q("g", "n")) * (1 + 1j * y_l))
    else:
        K = np.ones(grid.shape, dtype=complex)
        A = np.ones(grid.shape, dtype=complex)
    cross = k2 * beta_l * beta_n * (1 - 1j * q("n", "l")) ** 2 if beta_n > 0 else 0.0
    X = (1 + g_nn) * (1 + 1j * x_n + dress / d_gm - cross / (1 + 1j * x_l))
    Y = (1 + g_nn) * (1 + 1j * y_n + dress / p_gm - cross / (1 + 1j * y_l))
    if np.any(np.abs(X) < 1e-12) or np.any(np.abs(Y) < 1e-12):
        raise SingularDenominator("X or Y vanishes on the scan grid")

    chi3 = K / (d_gm * X)
    alpha1 = np.real((1 - params.g_mn / (d_gm * X)) / d_gm)
    alpha_mu = 1 - k3 * beta_l
    if beta_l > 0 and k3 > 0:
        alpha_mu = alpha_mu + k3 * beta_l * fano_term(y_l, q("g", "l"))
    if g_nn > 0 and k4 > 0:
        alpha_mu = alpha_mu - np.real(k4 * g_nn * A ** 2 * (1 - 1j * q("g", "n")) ** 2 / Y)
    alpha_mu = np.broadcast_to(alpha_mu, grid.shape).astype(float)
    return LicsSpectrum(grid, x_l, x_n, y_l, y_n, K, A, X, Y, chi3, alpha1, alpha_mu)
