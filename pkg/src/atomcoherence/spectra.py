"""Probe absorption, refraction and gain spectra.

Responses are dimensionless form factors: absorption is normalized to its
line-centre value with every strong field off, so the absolute scale
(dipole moment and density) is left to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import hilbert

from .errors import GridTooNarrow, UndefinedNormalization, ValidationError
from .scheme import FieldSet, LevelScheme, Populations, ensure_valid
from .steady_state import coherence_ratios, interference_factors, saturated_populations


@dataclass(frozen=True)
class SpectrumSeries:
    """A response sampled on a strictly increasing detuning grid.

    Attributes
    ----------
    detuning : ndarray
        Grid in rad/s.
    values : ndarray
        Samples; complex for full responses, real for absorption-only.
    kind : str
        What the samples represent, e.g. ``"alpha4"`` or ``"f"``.
    meta : dict
        Free-form provenance.
    """

    detuning: np.ndarray
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.detuning, dtype=float)
        vals = np.asarray(self.values)
        if grid.ndim != 1 or vals.shape != grid.shape:
            raise ValidationError("sample count must equal grid count")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValidationError("detuning grid must be strictly increasing")
        object.__setattr__(self, "detuning", grid)
        object.__setattr__(self, "values", vals)

    @property
    def real(self) -> np.ndarray:
        return np.real(self.values)

    @property
    def imag(self) -> np.ndarray:
        return np.imag(self.values)


class GainThresholdReport(NamedTuple):
    """Inversionless-gain condition ``left >= right`` at line centre.

    ``left = (r_n - r_m)|G_3|²/(Γ Γ_gm)`` and ``right = r_n - r_g``, both
    signed, so that ``satisfied`` coincides with a negative line-centre
    absorption. ``threshold`` is the ``|G_3|²`` at which the condition
    first holds, ``nan`` when it never does within the search range.
    """

    threshold: float
    satisfied: bool
    left: float
    right: float


class SumRuleResult(NamedTuple):
    integral: float
    delta_r: float


def _grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 1 or not np.all(np.diff(g) > 0):
        raise ValidationError("detuning grid must be one-dimensional and strictly increasing")
    return g


def default_grid(scale: float, points: int = 4001, factor: float = 20.0) -> np.ndarray:
    """Symmetric grid over ``±factor·scale``."""
    return np.linspace(-factor * scale, factor * scale, points)


# ---------------------------------------------------------------------------
# probe on the l-m transition with a strong field on l-g

def absorption_spectrum_4(scheme: LevelScheme, fields: FieldSet, grid) -> SpectrumSeries:
    """Normalized absorption at ``ω_4`` versus ``Ω_4``.

    The returned complex samples are ``Γ_lm R_4 / (P_4 Δn_4)``; the real part
    is ``α(Ω_4)/α⁰(0)``.

    Raises
    ------
    UndefinedNormalization
        If ``Δn_4 = n_l - n_m`` is zero.
    """
    ensure_valid(scheme)
    if fields.g3 != 0:
        raise ValidationError("g3: the l-m probe spectrum assumes no field on n-m")
    dn4 = scheme.n_l - scheme.n_m
    if dn4 == 0:
        raise UndefinedNormalization("Δn_4 = 0: normalization undefined")
    g = _grid(grid)
    f = fields.effective().replace(omega4=g)
    pops = saturated_populations(scheme, f.replace(omega4=0.0))
    _, r4 = coherence_ratios(scheme, f, pops)
    p4 = scheme.width_lm + 1j * g
    vals = scheme.width_lm * r4 / (p4 * dn4)
    return SpectrumSeries(g, vals, "alpha4", {"populations": pops})


def raman_far_detuned(scheme: LevelScheme, fields: FieldSet, grid) -> SpectrumSeries:
    """Far-detuned (Raman) approximation to :func:`absorption_spectrum_4`.

    Valid for ``|Ω_1| ≈ |Ω_4| ≫`` the one-photon widths and weak
    interference factors::

        Γ_lm²(r_l-r_m)/(Δn_4 Ω_4²)
          - Γ_gm Γ_lm/(Γ_gm² + (Ω_4-Ω_1)²) · |G_1|²(r_m-r_g)/(Ω_4² Δn_4)
    """
    dn4 = scheme.n_l - scheme.n_m
    if dn4 == 0:
        raise UndefinedNormalization("Δn_4 = 0: normalization undefined")
    g = _grid(grid)
    f = fields.effective()
    p = saturated_populations(scheme, f.replace(omega4=0.0))
    s = scheme
    lor = s.width_gm * s.width_lm / (s.width_gm ** 2 + (g - f.omega1) ** 2)
    vals = (s.width_lm ** 2 * p.dr4 / (dn4 * g ** 2)
            - lor * abs(f.g1) ** 2 * (p.r_m - p.r_g) / (g ** 2 * dn4))
    return SpectrumSeries(g, vals, "alpha4_raman")


def amplification_condition_4(scheme: LevelScheme, fields: FieldSet) -> GainThresholdReport:
    """Resonant gain/transparency condition for the ``ω_4`` probe.

    ``left = |G_1|²(r_l - r_g)/(Γ_lg Γ_gm)``, ``right = r_l - r_m``; evaluated
    at ``Ω_1 = Ω_4 = 0`` with the saturated populations.
    """
    f = fields.effective().replace(omega1=0.0, omega4=0.0)
    p = saturated_populations(scheme, f)
    left = abs(f.g1) ** 2 * p.dr1 / (scheme.width_lg * scheme.width_gm)
    return GainThresholdReport(math.nan, bool(left >= p.dr4), float(left), float(p.dr4))


# ---------------------------------------------------------------------------
# V scheme g - n - m with a strong field on n-m and a probe on n-g

def _vscheme_populations(scheme, g3, omega3, populations):
    if populations is not None:
        return populations
    return saturated_populations(scheme, FieldSet(g3=g3, omega3=omega3))


def vscheme_form_factor(scheme: LevelScheme, g3: complex, omega3: float, grid,
                        populations: Optional[Populations] = None) -> SpectrumSeries:
    """Complex form factor ``f(Ω_2)`` of the V scheme.

    ``f = iΓ_gn [P̄_32 Δr_2 - |G_3|² Δr_3 / P̄_3] / (Δn_2 [P_2 P̄_32 + |G_3|²])``
    where ``P̄_32 = Γ_gm + i(Ω_2 - Ω_3)`` and ``P̄_3 = Γ_nm - iΩ_3`` are
    conjugated denominators. ``Im f`` is the absorption normalized to the
    bare line centre and ``Re f`` the resonant refraction.
    """
    ensure_valid(scheme)
    dn2 = scheme.n_n - scheme.n_g
    if dn2 == 0:
        raise UndefinedNormalization("Δn_2 = 0: normalization undefined")
    g = _grid(grid)
    p = _vscheme_populations(scheme, g3, omega3, populations)
    s3 = abs(g3) ** 2
    p2 = scheme.width_ng + 1j * g
    p32c = scheme.width_gm + 1j * (g - omega3)
    p3c = scheme.width_nm - 1j * omega3
    num = p32c * p.dr2 - s3 * p.dr3 / p3c
    vals = 1j * scheme.width_ng * num / (dn2 * (p2 * p32c + s3))
    return SpectrumSeries(g, vals, "f", {"populations": p})


def vscheme_response(scheme: LevelScheme, g3: complex, omega3: float, grid,
                     populations: Optional[Populations] = None, *,
                     alpha0: float = 1.0, dn0: float = 1.0):
    """Absorption ``α⁰·Im f`` and refraction ``δn⁰·Re f`` over ``Ω_2``.

    Returns
    -------
    (SpectrumSeries, SpectrumSeries)
        Absorption and refraction on the same grid.
    """
    f = vscheme_form_factor(scheme, g3, omega3, grid, populations)
    absorption = SpectrumSeries(f.detuning, alpha0 * f.imag, "absorption", f.meta)
    refraction = SpectrumSeries(f.detuning, dn0 * f.real, "refraction", f.meta)
    return absorption, refraction


def vscheme_center(scheme: LevelScheme, g3: complex, populations: Populations) -> float:
    """Line-centre absorption at ``Ω_2 = Ω_3 = 0``.

    ``[r_n - r_g - (r_n - r_m)|G_3|²/(Γ Γ_gm)] / ([1 + |G_3|²/(Γ_gm Γ_gn)] Δn_2)``
    """
    s = scheme
    s3 = abs(g3) ** 2
    dn2 = s.n_n - s.n_g
    if dn2 == 0:
        raise UndefinedNormalization("Δn_2 = 0: normalization undefined")
    num = populations.dr2 - populations.dr3 * s3 / (s.width_nm * s.width_gm)
    return num / ((1 + s3 / (s.width_gm * s.width_ng)) * dn2)


def gain_threshold(scheme: LevelScheme, fields: FieldSet,
                   population_model: Optional[Callable[[float], Populations]] = None,
                   *, hi: Optional[float] = None) -> GainThresholdReport:
    """Inversionless-gain condition for the V-scheme probe at line centre.

    Parameters
    ----------
    fields
        Only ``g3`` is used; the configuration is taken resonant.
    population_model : callable, optional
        ``|G_3|² -> Populations``. Defaults to the saturated populations of
        the open scheme driven on n-m at resonance.
    hi : float, optional
        Upper end of the ``|G_3|²`` bracket; by default it is expanded
        geometrically until the condition holds.
    """
    s = scheme
    if population_model is None:
        def population_model(s3):
            return saturated_populations(s, FieldSet(g3=math.sqrt(s3)))

    def sides(s3):
        p = population_model(s3)
        return float(p.dr3 * s3 / (s.width_nm * s.width_gm)), float(p.dr2)

    s3_now = abs(fields.g3) ** 2
    left, right = sides(s3_now)

    def h(s3):
        a, b = sides(s3)
        return a - b

    threshold = math.nan
    if h(0.0) >= 0:
        threshold = 0.0
    else:
        top = hi if hi is not None else max(s3_now, s.width_nm * s.width_gm)
        expand = hi is None
        tries = 0
        while h(top) < 0 and expand and tries < 80:
            top *= 4.0
            tries += 1
        if h(top) >= 0:
            lo = 0.0
            for _ in range(200):
                mid = 0.5 * (lo + top)
                if h(mid) >= 0:
                    top = mid
                else:
                    lo = mid
                if top - lo <= 1e-14 * top:
                    break
            threshold = top
    return GainThresholdReport(threshold, bool(left >= right), left, right)


# ---------------------------------------------------------------------------
# sum rule and spectral utilities

def sum_rule_check(scheme: LevelScheme, fields: FieldSet, grid=None, *, transition: int = 2,
                   populations: Optional[Populations] = None) -> SumRuleResult:
    """Integrated probe absorption profile ``∫ dΩ Re(-i r / G)``.

    The profile is integrated with the trapezoid rule plus the analytic
    ``1/Ω²`` tail beyond each grid edge. The exact value is ``π Δr``,
    independent of the coherent reshaping of the line.

    Parameters
    ----------
    transition : {2, 4}
        Probe at ``ω_2`` (n-g) or at ``ω_4`` (l-m).
    grid : array_like, optional
        Probe detunings. By default ``±200`` times the largest width or
        Rabi frequency, with spacing a quarter of the narrowest width.

    Raises
    ------
    GridTooNarrow
        If the profile at a grid edge exceeds ``1e-4`` of its peak.
    """
    if transition not in (2, 4):
        raise ValidationError("transition must be 2 or 4")
    ensure_valid(scheme)
    f = fields.effective()
    pops = populations if populations is not None else saturated_populations(scheme, f)
    s = scheme
    widths = [s.width_lg, s.width_ng, s.width_nm, s.width_lm, s.width_ln, s.width_gm]
    if grid is None:
        scale = max(max(widths), abs(f.g1), abs(f.g3), abs(f.omega1), abs(f.omega3))
        half = 200.0 * scale
        points = max(4001, int(math.ceil(2 * half / (0.25 * min(widths)))) + 1)
        grid = np.linspace(-half, half, points)
    g = _grid(grid)
    name = "omega2" if transition == 2 else "omega4"
    fs = f.replace(**{name: g})
    fac = interference_factors(s, fs)
    r2, r4 = coherence_ratios(s, fs, pops, fac)
    if transition == 2:
        prof = np.real(r2 / (s.width_ng + 1j * g))
        dr = pops.dr2
    else:
        prof = np.real(r4 / (s.width_lm + 1j * g))
        dr = pops.dr4
    peak = np.abs(prof).max()
    if peak > 0 and max(abs(prof[0]), abs(prof[-1])) > 1e-4 * peak:
        raise GridTooNarrow("profile has not decayed at the grid edges")
    integral = trapezoid(prof, g)
    integral += prof[0] * abs(g[0]) + prof[-1] * abs(g[-1])
    return SumRuleResult(float(integral), float(dr))


def hilbert_partner(series: SpectrumSeries, pad: int = 4) -> np.ndarray:
    """Estimate the dispersive partner of an absorptive profile.

    Uses ``H[y](x) = (1/π) PV∫ y(t)/(x - t) dt`` evaluated by FFT on a
    zero-padded uniform grid. For ``f`` analytic in the lower half-plane,
    ``Re f = H[Im f]``.
    """
    y = np.real(series.values)
    n = y.size
    total = pad * n
    padded = np.zeros(total)
    start = (total - n) // 2
    padded[start:start + n] = y
    return np.imag(hilbert(padded))[start:start + n]


def find_peaks_quadratic(grid, values, *, minima: bool = False,
                         min_height: Optional[float] = None) -> np.ndarray:
    """Locations of local maxima refined by a three-point parabola.

    Parameters
    ----------
    minima : bool
        Locate minima instead.
    min_height : float, optional
        Ignore extrema whose sampled value (sign-adjusted) is below this.
    """
    x = np.asarray(grid, dtype=float)
    y = np.asarray(values, dtype=float)
    if minima:
        y = -y
    idx = np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1
    out = []
    for i in idx:
        if min_height is not None and y[i] < min_height:
            continue
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
        out.append(x[i] + shift * (x[i + 1] - x[i]))
    return np.array(out)
