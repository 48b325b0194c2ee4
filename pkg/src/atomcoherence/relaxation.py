"""Relaxation-induced interference in a doublet.

Two upper sublevels ``n`` and ``n'`` share the lower level ``g``. The
second-order coherence between them, driving mixing at ``2ω_1 - ω_2``,
contains a resonance at ``Ω = 0`` whose strength is set by the mismatch
``Γ_nn' - Γ_n'g - Γ_ng``. For purely radiative widths with a stable
ground state the mismatch vanishes and so does the resonance; collisions
restore it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DoubletConfig:
    """Detunings and coherence widths (rad/s).

    ``omega1 = ω_1 - ω_ng``, ``omega2 = ω_2 - ω_n'g``,
    ``omega = ω_2 - ω_1 - ω_n'n``.
    """

    omega1: object
    omega2: object
    omega: object
    width_ng: float
    width_n2g: float
    width_nn2: float

    @classmethod
    def spontaneous(cls, *, decay_n: float, decay_n2: float, decay_g: float = 0.0,
                    collisional: float = 0.0, omega1=0.0, omega2=0.0, omega=0.0) -> "DoubletConfig":
        """Widths ``(Γ_i + Γ_j)/2``, with ``collisional`` added to ``Γ_nn'`` only."""
        return cls(omega1, omega2, omega,
                   width_ng=0.5 * (decay_n + decay_g),
                   width_n2g=0.5 * (decay_n2 + decay_g),
                   width_nn2=0.5 * (decay_n + decay_n2) + collisional)

    @property
    def mismatch(self) -> float:
        return self.width_nn2 - self.width_n2g - self.width_ng


def interference_bracket(cfg: DoubletConfig):
    """``1 - i(Γ_nn' - Γ_n'g - Γ_ng)/(Ω + iΓ_nn')``."""
    om = np.asarray(cfg.omega, dtype=float)
    return 1 - 1j * cfg.mismatch / (om + 1j * cfg.width_nn2)


def doublet_coherence(cfg: DoubletConfig):
    """Second-order coherence ``ρ_n'n`` up to a constant factor."""
    o1 = np.asarray(cfg.omega1, dtype=float)
    o2 = np.asarray(cfg.omega2, dtype=float)
    pre = 1 / ((o2 + 1j * cfg.width_n2g) * (o1 - 1j * cfg.width_ng))
    return pre * interference_bracket(cfg)


def resonance_contrast(cfg: DoubletConfig) -> float:
    """``|bracket(Ω=0) - 1| = |Γ_nn' - Γ_n'g - Γ_ng| / Γ_nn'``."""
    return float(abs(1j * cfg.mismatch / (1j * cfg.width_nn2)))
