"""Local-field corrections to probe spectra in a dense medium.

The microscopic field acting on an atom includes the polarization of its
neighbours, ``E_L = E + P/(3ε₀)``. For a Lambda scheme n-m-l (l ground,
strong field on n-m, probe on l-m) this red-shifts the one-photon
resonance by ``δ_4L = |d|²N/(3ε₀ħ)`` while leaving the two-photon
resonance untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import LorentzCatastrophe, ValidationError
from .scheme import LevelScheme, ensure_valid
from .spectra import SpectrumSeries

DEBYE = 1e-21 / constants.c  # C·m


@dataclass(frozen=True)
class LocalFieldConfig:
    """Dense-medium parameters.

    Parameters
    ----------
    density : float
        Number density in m^-3.
    dipole : float
        Transition dipole moment ``|d_ml|`` in C·m.
    ground_shift : float
        Optional resonant-exchange shift of the ground level (rad/s),
        applied to both probe denominators; usually negligible.
    """

    density: float
    dipole: float
    ground_shift: float = 0.0

    def __post_init__(self):
        if self.density < 0 or self.dipole < 0:
            raise ValidationError("density and dipole must be non-negative")

    @property
    def shift(self) -> float:
        """``δ_4L = |d|²N/(3ε₀ħ)`` in rad/s."""
        return self.dipole ** 2 * self.density / (3 * constants.epsilon_0 * constants.hbar)

    @property
    def self_broadening(self) -> float:
        """Resonance-exchange halfwidth ``|d|²N/(6ε₀ħ)``."""
        return self.dipole ** 2 * self.density / (6 * constants.epsilon_0 * constants.hbar)

    def c4(self, width_ml: float) -> float:
        """Shift-to-width ratio ``C_4 = δ_4L/Γ_ml``."""
        return self.shift / width_ml


def clausius_mossotti(alpha: complex, density: float):
    """Permittivity and local-field factor ``(ε, L)``.

    ``L = (1 - αN/3)^-1`` and ``ε = 1 + LNα`` with ``α`` the polarizability
    in SI volume units (``P = ε₀ N α E_L``).
    """
    den = 1 - alpha * density / 3
    if np.any(np.abs(den) < 1e-10):
        raise LorentzCatastrophe("1 - αN/3 vanishes")
    lf = 1 / den
    return 1 + lf * density * alpha, lf


def dressed_probe_susceptibility(scheme: LevelScheme, g3: complex, grid,
                                 lf: LocalFieldConfig, omega3: float = 0.0,
                                 chi0: complex = 1j) -> SpectrumSeries:
    """Probe susceptibility ``χ_4 = χ_4⁰ f(Ω_4)`` of the dense Lambda scheme.

    ``f = Γ_lm P_43 / ((P_4 - iδ_4L) P_43 + |G_3|²)``

    Only the one-photon denominator ``P_4`` carries the local-field shift.
    With the default ``χ_4⁰ = i``, ``Im χ_4 = Re f`` is the absorption
    normalized to the bare line centre. The form factor itself is stored
    in ``meta["f"]``.
    """
    ensure_valid(scheme)
    w4 = np.asarray(grid, dtype=float) - lf.ground_shift
    p4 = scheme.width_lm + 1j * w4
    p43 = scheme.width_ln + 1j * (w4 - omega3)
    f = scheme.width_lm * p43 / ((p4 - 1j * lf.shift) * p43 + abs(g3) ** 2)
    return SpectrumSeries(np.asarray(grid, dtype=float), chi0 * f, "chi4",
                          {"f": f, "shift": lf.shift, "c4": lf.c4(scheme.width_lm)})


def local_field_factor(f_value, c4: float):
    """Ratio of local to applied probe field, ``L_4 = 1 + i C_4 f``.

    Follows from ``L = 1 + χ/3`` with ``χ_4 = i (3δ_4L/Γ_lm) f``.
    """
    return 1 + 1j * c4 * np.asarray(f_value)
