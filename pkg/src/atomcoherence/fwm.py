"""Resonant four-wave mixing in a ladder dressed by two strong fields.

Levels 0-1-2-3 form a ladder. Weak ``E_1`` drives 0-1, strong ``E_2`` and
``E_3`` drive 1-2 and 2-3, and the generated (or probe) wave ``E_s`` closes
the loop on 0-3. All quantities are normalized by the transition
halfwidths: ``P_0i = 1 + i x`` carry the detunings reached via the input
waves, ``D_0i = 1 + i y`` those reached via ``ω_s``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import SingularDenominator

_GUARD = 1e-12


@dataclass(frozen=True)
class MixingConfig:
    """Dressing strengths and normalized detunings.

    Parameters
    ----------
    g2, g3 : complex
        ``|G_2|²/(Γ_10Γ_20)`` and ``|G_3|²/(Γ_30Γ_20)``.
    x1, x02, xs : float or ndarray
        Normalized detunings ``(ω_1-ω_10)/Γ_10``, ``(ω_1+ω_2-ω_20)/Γ_20``,
        ``(ω_s-ω_30)/Γ_30``.
    y1, y02, ys : float or ndarray, optional
        The corresponding detunings reached from ``ω_s``. When omitted the
        frequency relation ``ω_s = ω_1+ω_2+ω_3`` is enforced and ``y = x``.
    """

    g2: complex = 0.0
    g3: complex = 0.0
    x1: object = 0.0
    x02: object = 0.0
    xs: object = 0.0
    y1: object = None
    y02: object = None
    ys: object = None

    @classmethod
    def from_rabi(cls, g2_rabi: complex, g3_rabi: complex, width10: float, width20: float,
                  width30: float, **detunings) -> "MixingConfig":
        """Build from Rabi frequencies and halfwidths (rad/s)."""
        return cls(g2=abs(g2_rabi) ** 2 / (width10 * width20),
                   g3=abs(g3_rabi) ** 2 / (width30 * width20), **detunings)

    def replace(self, **kw) -> "MixingConfig":
        return dataclasses.replace(self, **kw)

    @property
    def enforced(self) -> bool:
        return self.y1 is None and self.y02 is None and self.ys is None

    def denominators(self):
        """``(P01, P02, P03, D01, D02, D03)``."""
        x1, x02, xs = (np.asarray(v, dtype=float) for v in (self.x1, self.x02, self.xs))
        y1 = x1 if self.y1 is None else np.asarray(self.y1, dtype=float)
        y02 = x02 if self.y02 is None else np.asarray(self.y02, dtype=float)
        ys = xs if self.ys is None else np.asarray(self.ys, dtype=float)
        return (1 + 1j * x1, 1 + 1j * x02, 1 + 1j * xs,
                1 + 1j * y1, 1 + 1j * y02, 1 + 1j * ys)


def _inv(z, what):
    if np.any(np.abs(z) < _GUARD):
        raise SingularDenominator(f"{what} bracket vanishes")
    return 1.0 / z


def eit_factors(cfg: MixingConfig) -> Tuple[complex, complex, complex]:
    """Strong-field factors ``(f_1, f_s, f)``.

    ``f_1 = {1 + g_2/(P01 P02) · [1 + g_3/(P02 D03)]^-1}^-1``
    ``f_s = {1 + g_3/(P03 D02) · [1 + g_2/(D02 D01)]^-1}^-1``
    ``f   = [1 + g_2/(D02 D01) + g_3/(D03 P02)]^-1``

    The dressed-denominator grouping of ``f_1`` and ``f_s`` reduces to
    two-level saturation for a single dressing field and gives
    ``f = f_1 [1 + g_3/(D03 P02)]^-1`` when ``D = P``.
    """
    p1, p2, p3, d1, d2, d3 = cfg.denominators()
    g2, g3 = cfg.g2, cfg.g3
    f1 = _inv(1 + g2 / (p1 * p2) * _inv(1 + g3 / (p2 * d3), "f1 inner"), "f1")
    fs = _inv(1 + g3 / (p3 * d2) * _inv(1 + g2 / (d2 * d1), "fs inner"), "fs")
    f = _inv(1 + g2 / (d2 * d1) + g3 / (d3 * p2), "f")
    return f1, fs, f


def susceptibilities(cfg: MixingConfig, chi1_0: complex = 1j, chis_0: complex = 1j,
                     chinl_0: complex = 1.0):
    """Effective susceptibilities ``(χ_1, χ_s, χ^NL)``.

    The linear normalizations default to ``i`` so that ``Im χ`` is the
    absorption, equal to one at the bare line centre.
    """
    p1, p2, p3, _, _, _ = cfg.denominators()
    f1, fs, f = eit_factors(cfg)
    return chi1_0 * f1 / p1, chis_0 * fs / p3, chinl_0 * f / (p1 * p2 * p3)


def generated_power_scaling(cfg: MixingConfig, density: float = 1.0):
    """Relative generated power ``g_2 g_3 |χ^NL|² N²``."""
    _, _, chi = susceptibilities(cfg)
    return np.abs(cfg.g2 * cfg.g3) * np.abs(chi) ** 2 * density ** 2


def absorbed_power_scaling(cfg: MixingConfig, density: float = 1.0, length: float = 0.0):
    """Generated power weighted by the input-wave attenuation ``exp(-Im χ_1 N L)``."""
    chi1, _, _ = susceptibilities(cfg)
    return generated_power_scaling(cfg, density) * np.exp(-np.imag(chi1) * density * length)


def single_dressing(cfg: MixingConfig, g4: complex) -> MixingConfig:
    """Transparency induced only at ``ω_s`` by a field on an adjacent transition.

    Obtained from the ladder formulas by removing ``g_2`` and letting the
    extra field play the dressing role of ``g_3`` (``g_4 = |G_4|²/(Γ_30Γ_40)``).
    """
    return cfg.replace(g2=0.0, g3=g4)
