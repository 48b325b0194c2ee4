"""Alkali vapour in a buffer gas: collisional population transfer.

Levels: ``n`` ground S state, ``m`` the upper fine-structure P level driven
by the strong field, ``g`` the lower P level reached by collisions and
probed on the n-g line. Collisions transfer population m -> g at
``ν_mg`` and back at ``ν_gm``.

Rate balance (``w = 2|G|²Γ/(Γ² + Ω_3²)`` is the optical pumping rate)::

    (Γ_m + ν_mg) r_m - ν_gm r_g = w (r_n - r_m)
    (Γ_g + ν_gm) r_g - ν_mg r_m = 0
    r_m + r_n + r_g = N
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from scipy import constants

from .errors import RegimeViolation, ValidationError
from .scheme import LevelScheme, Populations
from .units import wavenumber_to_joule

_AMU = constants.physical_constants["atomic mass constant"][0]


@dataclass(frozen=True)
class CollisionModel:
    """Parameters of the buffer-gas model.

    Parameters
    ----------
    delta_e_cm : float
        Fine-structure splitting ``E_m - E_g`` in cm^-1.
    temperature : float
        Kelvin.
    sigma_mg : float
        Inelastic m -> g cross-section in cm².
    pressure_atm : float
        Buffer-gas pressure, used when ``n_buffer`` is not given.
    n_buffer : float, optional
        Buffer-gas density in cm^-3.
    mean_speed : float, optional
        Mean relative speed in cm/s; defaults to the Maxwell value for the
        reduced mass of the pair.
    nu_mg, nu_gm : float, optional
        Collision rates in 1/s. ``nu_mg`` defaults to
        ``n_buffer · mean_speed · sigma_mg``; ``nu_gm`` to the detailed
        balance value ``nu_mg · exp(-ΔE/k_B T)``.
    decay_g, decay_m : float
        Radiative decay rates of the P levels (1/s).
    width : float
        Collisional halfwidth ``Γ`` of the driven transition (rad/s).
    width_gm : float, optional
        Two-photon coherence halfwidth; defaults to ``nu_mg``.
    width_gn : float, optional
        Probe-transition halfwidth; defaults to ``width``.
    total : float
        Total population ``N``.
    wavelength : float
        Strong-field wavelength in metres.
    mass_a_amu, mass_b_amu : float
        Masses of the active atom and the buffer-gas atom.
    """

    delta_e_cm: float = 17.2
    temperature: float = 550.0
    sigma_mg: float = 4e-15
    pressure_atm: float = 1.0
    n_buffer: Optional[float] = None
    mean_speed: Optional[float] = None
    nu_mg: Optional[float] = None
    nu_gm: Optional[float] = None
    decay_g: float = 6.2e7
    decay_m: float = 6.2e7
    width: float = 5e10
    width_gm: Optional[float] = None
    width_gn: Optional[float] = None
    total: float = 1.0
    wavelength: float = 589.0e-9
    mass_a_amu: float = 22.98977
    mass_b_amu: float = 4.002602

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is not None and (not math.isfinite(v) or v < 0):
                raise ValidationError(f"{f.name}: must be finite and non-negative")
        if self.temperature <= 0:
            raise ValidationError("temperature must be positive")

    # derived quantities ---------------------------------------------------
    @property
    def delta_e_over_kt(self) -> float:
        return wavenumber_to_joule(self.delta_e_cm) / (constants.k * self.temperature)

    @property
    def boltzmann(self) -> float:
        return math.exp(-self.delta_e_over_kt)

    @property
    def buffer_density(self) -> float:
        """Buffer density in cm^-3."""
        if self.n_buffer is not None:
            return self.n_buffer
        return self.pressure_atm * constants.atm / (constants.k * self.temperature) * 1e-6

    @property
    def relative_speed(self) -> float:
        """Mean relative speed in cm/s."""
        if self.mean_speed is not None:
            return self.mean_speed
        mu = self.mass_a_amu * self.mass_b_amu / (self.mass_a_amu + self.mass_b_amu) * _AMU
        return math.sqrt(8 * constants.k * self.temperature / (math.pi * mu)) * 100.0

    @property
    def rate_mg(self) -> float:
        if self.nu_mg is not None:
            return self.nu_mg
        return self.buffer_density * self.relative_speed * self.sigma_mg

    @property
    def rate_gm(self) -> float:
        if self.nu_gm is not None:
            return self.nu_gm
        return self.rate_mg * self.boltzmann

    @property
    def gamma_gm(self) -> float:
        return self.width_gm if self.width_gm is not None else self.rate_mg

    @property
    def gamma_gn(self) -> float:
        return self.width_gn if self.width_gn is not None else self.width


class CollisionalPopulations(NamedTuple):
    """Population differences ``r_n - r_m``, ``r_n - r_g`` and saturation ``κ``."""

    dnm: float
    dng: float
    kappa: float


class RateEstimates(NamedTuple):
    """Derived sodium numbers; rates in 1/s, ``g3_abs`` in rad/s.

    ``eq_coefficient`` is the fast-collision balance coefficient and
    ``eq_coefficient_full`` the one with level decay kept.
    """

    delta_e_over_kt: float
    boltzmann: float
    eq_coefficient: float
    eq_coefficient_full: float
    buffer_density: float
    mean_speed: float
    nu_mg: float
    nu_gm: float
    kappa_per_intensity: float
    intensity: float
    g3_abs: float
    g3_ghz: float
    kappa: float
    g3_sq_over_widths: float
    gain_estimate: float


def pumping_rate(model: CollisionModel, g3: complex, omega3: float) -> float:
    """Optical pumping rate ``2|G_3|²Γ/(Γ² + Ω_3²)`` per unit inversion."""
    return 2 * abs(g3) ** 2 * model.width / (model.width ** 2 + omega3 ** 2)


def saturation(model: CollisionModel, g3: complex, omega3: float) -> float:
    """Saturation parameter ``κ`` of the full collisional balance."""
    nmg, ngm, gg, gm = model.rate_mg, model.rate_gm, model.decay_g, model.decay_m
    return (pumping_rate(model, g3, omega3) * (nmg + 2 * (ngm + gg))
            / (gg * nmg + gm * (ngm + gg)))


def balance_coefficient(model: CollisionModel, simplified: bool = False) -> float:
    """Coefficient ``c`` in ``r_n - r_g = N(1 - cκ)/(1 + κ)``.

    The full form is ``(ν_mg - ν_gm - Γ_g)/(ν_mg + 2(ν_gm + Γ_g))``; in the
    fast-collision limit with detailed balance it tends to
    ``(1 - e)/(1 + 2e)`` with ``e = exp(-ΔE/k_B T)``.
    """
    if simplified:
        e = model.boltzmann
        return (1 - e) / (1 + 2 * e)
    nmg, ngm, gg = model.rate_mg, model.rate_gm, model.decay_g
    return (nmg - ngm - gg) / (nmg + 2 * (ngm + gg))


def populations(model: CollisionModel, g3: complex, omega3: float = 0.0, *,
                simplified: bool = False) -> CollisionalPopulations:
    """Saturated population differences under the strong field.

    Parameters
    ----------
    simplified : bool
        Use the fast-collision, detailed-balance limit (``ν_gm`` from the
        Boltzmann factor, level decays neglected against collisions).

    Raises
    ------
    RegimeViolation
        If ``simplified`` is requested while ``ν_mg - ν_gm <= Γ_g``.
    """
    n = model.total
    if simplified:
        if model.rate_mg - model.rate_mg * model.boltzmann <= model.decay_g:
            raise RegimeViolation("fast-collision limit needs ν_mg - ν_gm ≫ Γ_g")
        e = model.boltzmann
        kappa = pumping_rate(model, g3, omega3) / model.decay_m * (1 + 2 * e) / (1 + e)
    else:
        kappa = saturation(model, g3, omega3)
    c = balance_coefficient(model, simplified)
    return CollisionalPopulations(n / (1 + kappa), n / (1 + kappa) * (1 - c * kappa), kappa)


def level_populations(model: CollisionModel, g3: complex, omega3: float = 0.0) -> Populations:
    """Individual populations ``r_n, r_g, r_m`` (``r_l`` is zero)."""
    nmg, ngm, gg, gm = model.rate_mg, model.rate_gm, model.decay_g, model.decay_m
    dnm, _, _ = populations(model, g3, omega3)
    pump = pumping_rate(model, g3, omega3) * dnm
    den = gg * nmg + gm * (ngm + gg)
    r_m = pump * (gg + ngm) / den
    r_g = pump * nmg / den
    return Populations(r_l=0.0, r_g=r_g, r_n=model.total - r_m - r_g, r_m=r_m)


def g3_for_kappa(model: CollisionModel, kappa: float, omega3: float = 0.0) -> float:
    """``|G_3|`` that produces saturation ``κ`` in the full model."""
    unit = saturation(model, 1.0, omega3)
    return math.sqrt(kappa / unit)


def kappa_root(model: CollisionModel, simplified: bool = False) -> float:
    """Saturation at which ``r_n - r_g`` changes sign (``1/c``)."""
    c = balance_coefficient(model, simplified)
    if c <= 0:
        return math.inf
    return 1.0 / c


def rabi_squared(model: CollisionModel, intensity_w_cm2: float) -> float:
    """``|G|²`` in rad²/s² for a given intensity.

    With ``G = dE/2ħ`` and the dipole fixed by the radiative rate
    ``Γ_m = ω³d²/(3πε₀ħc³)``: ``|G|² = 3Γ_m λ³ I/(16π² ħ c)``.
    """
    intensity = intensity_w_cm2 * 1e4
    return (3 * model.decay_m * model.wavelength ** 3 * intensity
            / (16 * math.pi ** 2 * constants.hbar * constants.c))


def kappa_per_intensity(model: CollisionModel) -> float:
    """Slope of ``κ ≈ 3|G|²/(ΓΓ_m)`` versus intensity in (W/cm²)^-1.

    Equals ``9λ³/(16π² ħ c Γ)`` per W/m², independent of ``Γ_m``.
    """
    return 3 * rabi_squared(model, 1.0) / (model.width * model.decay_m)


def inversionless_gain_estimate(model: CollisionModel, kappa: Optional[float] = None) -> float:
    """Leading-order line-centre gain at ``r_n - r_g = 0``.

    Returns ``-Γ_m/(3Γ_gm)``, the normalized absorption for
    ``1 ≪ κ ≪ 3Γ_gm/Γ_m``. When ``kappa`` is given the finite-κ value
    ``-x κ/((1 + κ)(1 + κx))`` with ``x = Γ_m/(3Γ_gm)`` is returned instead.
    """
    x = model.decay_m / (3 * model.gamma_gm)
    if kappa is None:
        return -x
    return -x * kappa / ((1 + kappa) * (1 + kappa * x))


def estimate_rates(model: CollisionModel, power_w: float = 0.1,
                   area_cm2: float = 1e-5) -> RateEstimates:
    """Numerical estimates for a strong beam of given power and focal area."""
    intensity = power_w / area_cm2
    g2 = rabi_squared(model, intensity)
    kpi = kappa_per_intensity(model)
    kappa = kpi * intensity
    return RateEstimates(
        delta_e_over_kt=model.delta_e_over_kt,
        boltzmann=model.boltzmann,
        eq_coefficient=balance_coefficient(model, simplified=True),
        eq_coefficient_full=balance_coefficient(model),
        buffer_density=model.buffer_density,
        mean_speed=model.relative_speed,
        nu_mg=model.rate_mg,
        nu_gm=model.rate_gm,
        kappa_per_intensity=kpi,
        intensity=intensity,
        g3_abs=math.sqrt(g2),
        g3_ghz=math.sqrt(g2) / (2 * math.pi) / 1e9,
        kappa=kappa,
        g3_sq_over_widths=g2 / (model.width * model.gamma_gm),
        gain_estimate=inversionless_gain_estimate(model),
    )


def vscheme(model: CollisionModel) -> LevelScheme:
    """Level scheme for the probe spectra of this model.

    All population starts in the ground level ``n``; the ``l`` level is a
    spectator. Lower-level decay rates are nominal (they only fix the
    normalization ``Δn_2 = N``).
    """
    return LevelScheme.from_populations(
        n_l=0.0, n_g=0.0, n_n=model.total, n_m=0.0,
        decay_l=1.0, decay_g=model.decay_g, decay_n=1.0, decay_m=model.decay_m,
        width_lg=model.width, width_ng=model.gamma_gn, width_nm=model.width,
        width_lm=model.width, width_ln=model.width, width_gm=model.gamma_gm,
    )
