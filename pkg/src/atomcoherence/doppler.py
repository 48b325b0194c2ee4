"""Maxwell velocity averaging of the four-wave-mixing susceptibility.

The mixing wave is at ``ω_4 = ω_1 - ω_2 + ω_3`` on the loop of
:mod:`atomcoherence.scheme`. Collinear waves shift each detuning by
``-k_i v``. In the summation (cascade) arrangement the second wave enters
with its Doppler-shifted detuning reversed in sign.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import roots_hermite

from . import kernels
from .errors import DegenerateGeometry, QuadratureNotConverged, ValidationError
from .scheme import LevelScheme

Detunings = Tuple[object, object, object]


@dataclass(frozen=True)
class DopplerConfig:
    """Velocity-averaging setup.

    Parameters
    ----------
    u : float
        Thermal speed; the Maxwell weight is ``exp(-v²/u²)/(√π u)``.
    k1, k2, k3 : float
        Wave numbers of the three input waves (collinear).
    n_g, n_n, n_l, n_m : float
        Velocity-integrated unperturbed populations.
    scheme : {"difference", "sum"}
        Frequency subtraction (``ω_1-ω_2+ω_3``) or its cascade counterpart.
    method : {"auto", "hermite", "trapezoid"}
        Quadrature rule. ``auto`` picks the uniform rule once the Doppler
        width exceeds the narrowest homogeneous width five-fold.
    points : int
        Starting node count for Gauss-Hermite (doubled up to 4096).
    span : float
        Full width of the uniform velocity grid in units of ``u``.
    tol : float
        Convergence tolerance under node doubling.
    population_profile : callable, optional
        ``v -> (n_g-n_n, n_m-n_n, n_g-n_l)`` per unit velocity density,
        replacing the Maxwell-factorized default.
    """

    u: float
    k1: float
    k2: float
    k3: float
    n_g: float = 1.0
    n_n: float = 0.0
    n_l: float = 0.0
    n_m: float = 0.0
    scheme: str = "difference"
    method: str = "auto"
    points: int = 64
    span: float = 12.0
    tol: float = 1e-4
    population_profile: Optional[Callable] = None

    def __post_init__(self):
        if not (self.u > 0 and self.k1 > 0 and self.k2 > 0 and self.k3 > 0):
            raise ValidationError("u and all k_i must be positive")
        if self.scheme not in ("difference", "sum"):
            raise ValidationError(f"scheme must be 'difference' or 'sum', not {self.scheme!r}")
        if self.method not in ("auto", "hermite", "trapezoid"):
            raise ValidationError(f"unknown quadrature method {self.method!r}")
        if self.span < 6:
            raise ValidationError("velocity span must be at least 6u")

    @property
    def sign2(self) -> float:
        return 1.0 if self.scheme == "difference" else -1.0

    @property
    def pops(self) -> Tuple[float, float, float]:
        return (self.n_g - self.n_n, self.n_m - self.n_n, self.n_g - self.n_l)


@dataclass(frozen=True)
class DopplerAverage:
    """Numeric and closed-form velocity averages over a detuning scan."""

    numeric: np.ndarray
    closed_form: Optional[np.ndarray]
    nodes: int
    method: str


def _widths(scheme: LevelScheme) -> np.ndarray:
    return np.array([scheme.width_lm, scheme.width_gm, scheme.width_ng,
                     scheme.width_nm, scheme.width_ln, scheme.width_lg])


def _as_scan(detunings: Detunings):
    o1, o2, o3 = np.broadcast_arrays(*(np.atleast_1d(np.asarray(d, dtype=float)) for d in detunings))
    return (np.ascontiguousarray(o1.ravel()), np.ascontiguousarray(o2.ravel()),
            np.ascontiguousarray(o3.ravel()))


def chi3_velocity(scheme: LevelScheme, detunings: Detunings, v, cfg: DopplerConfig):
    """Susceptibility of atoms moving with velocity ``v`` (overall constant 1).

    Parameters
    ----------
    detunings : tuple
        ``(Ω_1, Ω_2, Ω_3)``; each may be an array.
    v : float or ndarray
        Velocity; broadcasts against the detunings.
    """
    w = _widths(scheme)
    gml, ggm, gng, gmn, gln, glg = w
    dgn, dmn, dgl = cfg.pops
    o1, o2, o3 = (np.asarray(d, dtype=float) for d in detunings)
    a = o1 - cfg.k1 * v
    b = cfg.sign2 * (o2 - cfg.k2 * v)
    c = o3 - cfg.k3 * v
    e = dgn / (gng - 1j * b)
    t = (e + dmn / (gmn + 1j * c)) / (ggm + 1j * (c - b))
    t = t + (e + dgl / (glg + 1j * a)) / (gln + 1j * (a - b))
    return 1j * t / (gml + 1j * (a - b + c))


def velocity_poles(scheme: LevelScheme, detunings: Detunings, cfg: DopplerConfig) -> dict:
    """Complex-velocity pole of every resonance denominator.

    Returns a mapping from a denominator label to its pole; the label lists
    the population differences whose terms contain that denominator.
    """
    w = dict(zip(("ml", "gm", "ng", "mn", "ln", "lg"), _widths(scheme)))
    o1, o2, o3 = (float(d) for d in detunings)
    s, k1, k2, k3 = cfg.sign2, cfg.k1, cfg.k2, cfg.k3

    def pole(gamma, c0, c1):
        # root of gamma + i (c0 - c1 v)
        return (c0 - 1j * gamma) / c1

    return {
        "ng (n_g-n_n only)": pole(w["ng"], -s * o2, -s * k2),
        "gm (n_g-n_n, n_m-n_n)": pole(w["gm"], o3 - s * o2, k3 - s * k2),
        "mn (n_m-n_n)": pole(w["mn"], o3, k3),
        "ln (n_g-n_n, n_g-n_l)": pole(w["ln"], o1 - s * o2, k1 - s * k2),
        "lg (n_g-n_l)": pole(w["lg"], o1, k1),
        "ml (all)": pole(w["ml"], o1 - s * o2 + o3, k1 - s * k2 + k3),
    }


def _hermite_nodes(n: int, cfg: DopplerConfig):
    t, w = roots_hermite(n)
    return cfg.u * t, w / math.sqrt(math.pi)


def _trapezoid_nodes(n: int, cfg: DopplerConfig):
    half = 0.5 * cfg.span * cfg.u
    v = np.linspace(-half, half, n)
    h = v[1] - v[0]
    w = h * np.exp(-(v / cfg.u) ** 2) / (math.sqrt(math.pi) * cfg.u)
    w[0] *= 0.5
    w[-1] *= 0.5
    return v, w


def _weighted_sum(scheme, scan, v, w, cfg, threads):
    widths = _widths(scheme)
    o1, o2, o3 = scan
    if cfg.population_profile is None:
        jobs = [(w, np.array(cfg.pops, dtype=float))]
    else:
        prof = [np.asarray(p, dtype=float) * np.ones_like(v) for p in cfg.population_profile(v)]
        jobs = [(np.ascontiguousarray(w * prof[i]), np.eye(3)[i]) for i in range(3)]

    def run(lo, hi):
        out = np.zeros(hi - lo, dtype=complex)
        for wt, pops in jobs:
            out += kernels.chi3_average(o1[lo:hi], o2[lo:hi], o3[lo:hi], v, wt,
                                        cfg.k1, cfg.k2, cfg.k3, widths, pops, cfg.sign2)
        return out

    n = o1.size
    if threads <= 1 or n < 2 * threads:
        return run(0, n)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda b: run(*b), zip(bounds[:-1], bounds[1:])))
    return np.concatenate(parts)


def choose_method(scheme: LevelScheme, cfg: DopplerConfig) -> str:
    """Resolve ``auto`` to a concrete quadrature rule."""
    if cfg.method != "auto":
        return cfg.method
    ku = max(cfg.k1, cfg.k2, cfg.k3) * cfg.u
    return "trapezoid" if ku > 5 * _widths(scheme).min() else "hermite"


def numeric_average(scheme: LevelScheme, detunings: Detunings, cfg: DopplerConfig,
                    *, threads: int = 1) -> Tuple[np.ndarray, int, str]:
    """Maxwell average by quadrature with node doubling.

    Returns ``(values, nodes, method)``.

    Raises
    ------
    QuadratureNotConverged
        When doubling the node count still changes the scan by more than
        ``cfg.tol`` relative to its largest magnitude.
    """
    scan = _as_scan(detunings)
    method = choose_method(scheme, cfg)
    if method == "hermite":
        nodes, cap, make = cfg.points, 4096, _hermite_nodes
    else:
        kmax = max(cfg.k1, cfg.k2, cfg.k3)
        step = 0.45 * _widths(scheme).min() / kmax
        nodes = max(cfg.points, int(math.ceil(cfg.span * cfg.u / step)) + 1)
        cap, make = max(2 ** 22, 4 * nodes), _trapezoid_nodes
    prev = _weighted_sum(scheme, scan, *make(nodes, cfg), cfg, threads)
    while nodes * 2 <= cap:
        nodes *= 2
        cur = _weighted_sum(scheme, scan, *make(nodes, cfg), cfg, threads)
        scale = np.abs(cur).max()
        if scale == 0 or np.abs(cur - prev).max() <= cfg.tol * scale:
            return cur, nodes, method
        prev = cur
    raise QuadratureNotConverged(f"{method} quadrature not converged at {nodes} nodes")


def closed_form_average(scheme: LevelScheme, detunings: Detunings, cfg: DopplerConfig):
    """Large-Doppler-width limit of the average (difference arrangement).

    Only the ``n_g - n_n`` terms survive. Closing the velocity contour
    around the single pole of ``Γ_ng - iΩ'_2`` gives::

        2 i √π exp(-(Ω_2/k_2u)²) (N_g-N_n)
        ---------------------------------------------------------
        k_2 u [Γ̃_1 + i(Ω_1 - k_1Ω_2/k_2)] [Γ̃_3 + i(Ω_3 - k_3Ω_2/k_2)]

    with ``Γ̃_1 = Γ_ln + (k_1/k_2 - 1)Γ_ng`` and
    ``Γ̃_3 = Γ_gm + (k_3/k_2 - 1)Γ_ng``. The residue collapses to this form
    when ``Γ_ml = Γ_ln + Γ_gm - Γ_ng``, which radiative widths satisfy.
    """
    o1, o2, o3 = _as_scan(detunings)
    k1, k2, k3, u = cfg.k1, cfg.k2, cfg.k3, cfg.u
    t1, t3 = tilde_widths(scheme, cfg)
    num = 2j * math.sqrt(math.pi) * np.exp(-(o2 / (k2 * u)) ** 2) * (cfg.n_g - cfg.n_n)
    return num / (k2 * u * (t1 + 1j * (o1 - k1 * o2 / k2)) * (t3 + 1j * (o3 - k3 * o2 / k2)))


def tilde_widths(scheme: LevelScheme, cfg: DopplerConfig) -> Tuple[float, float]:
    """Effective widths ``(Γ̃_1, Γ̃_3)`` of the averaged resonances."""
    t1 = scheme.width_ln + (cfg.k1 / cfg.k2 - 1) * scheme.width_ng
    t3 = scheme.width_gm + (cfg.k3 / cfg.k2 - 1) * scheme.width_ng
    return t1, t3


def chi3_averaged(scheme: LevelScheme, detunings: Detunings, cfg: DopplerConfig,
                  *, threads: int = 1) -> DopplerAverage:
    """Velocity-averaged susceptibility by quadrature and in closed form.

    The closed form is returned only for the difference arrangement with
    velocity-independent population ratios; it is ``None`` otherwise.
    """
    values, nodes, method = numeric_average(scheme, detunings, cfg, threads=threads)
    closed = None
    if cfg.scheme == "difference" and cfg.population_profile is None:
        closed = closed_form_average(scheme, detunings, cfg)
    return DopplerAverage(values, closed, nodes, method)


def raman_limit(detunings: Detunings, cfg: DopplerConfig):
    """Far-detuned shapes ``(raman, nonresonant)`` up to a constant.

    ``raman = exp(-((Ω_1-Ω_2)/((k_1-k_2)u))²) / (Ω_1 Ω_4)`` applies when
    only the Raman resonance ``ω_1 - ω_2 ≈ ω_ln`` is near;
    ``nonresonant = 1/(Ω_1 Ω_4 (Ω_1-Ω_2))`` applies when none is.

    Raises
    ------
    DegenerateGeometry
        If ``k_1 = k_2``: the residual Doppler width of the Raman line
        vanishes and the Gaussian collapses.
    """
    if cfg.k1 == cfg.k2:
        raise DegenerateGeometry("k1 = k2: residual Doppler width of the Raman resonance is zero")
    o1, o2, o3 = (np.asarray(d, dtype=float) for d in detunings)
    o4 = o1 - o2 + o3
    raman = np.exp(-((o1 - o2) / ((cfg.k1 - cfg.k2) * cfg.u)) ** 2) / (o1 * o4)
    with np.errstate(divide="ignore"):
        nonres = 1.0 / (o1 * o4 * (o1 - o2))
    return raman, nonres
