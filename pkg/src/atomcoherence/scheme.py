"""Level scheme, field set and complex resonance denominators.

The open four-level system has lower levels ``l`` and ``n`` and upper levels
``g`` and ``m``. Four fields couple the transitions in a closed loop::

    field 1 : l - g        field 3 : n - m
    field 2 : n - g        field 4 : l - m

All rates and detunings are angular frequencies (rad/s). Detunings may be
numpy arrays, so every helper here broadcasts over a detuning grid.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import ValidationError

LEVELS = ("l", "g", "n", "m")

#: (upper level, lower level) for each partial relaxation channel.
BRANCHES = {"branch_gl": ("g", "l"), "branch_ml": ("m", "l"),
            "branch_gn": ("g", "n"), "branch_mn": ("m", "n")}

WIDTHS = ("width_lg", "width_ng", "width_nm", "width_lm", "width_ln", "width_gm")


@dataclass(frozen=True)
class LevelScheme:
    """Relaxation and pumping constants of the open four-level system.

    Parameters
    ----------
    decay_l, decay_g, decay_n, decay_m : float
        Total population decay rates of each level.
    width_lg, width_ng, width_nm, width_lm, width_ln, width_gm : float
        Coherence halfwidths. Collisions may make them larger than half
        the sum of the level widths; they must be strictly positive.
    branch_gl, branch_ml, branch_gn, branch_mn : float
        Partial rates at which an upper level decays into a lower one.
    pump_l, pump_g, pump_n, pump_m : float
        Incoherent excitation rates feeding each level.

    Notes
    -----
    The unperturbed populations ``n_i`` are not stored separately; they are
    the stationary solution of the rate equations without fields and follow
    from the pumps. Use :meth:`from_populations` to specify populations and
    have the pumps derived instead.
    """

    decay_l: float
    decay_g: float
    decay_n: float
    decay_m: float
    width_lg: float
    width_ng: float
    width_nm: float
    width_lm: float
    width_ln: float
    width_gm: float
    branch_gl: float = 0.0
    branch_ml: float = 0.0
    branch_gn: float = 0.0
    branch_mn: float = 0.0
    pump_l: float = 0.0
    pump_g: float = 0.0
    pump_n: float = 0.0
    pump_m: float = 0.0

    @classmethod
    def from_populations(cls, *, n_l: float, n_g: float, n_n: float, n_m: float,
                         **rates: float) -> "LevelScheme":
        """Build a scheme whose field-free populations are ``n_l .. n_m``.

        The pump rates are solved from the rate balance. A ``ValidationError``
        is raised when a negative pump would be needed.
        """
        base = cls(**rates)
        q_g = base.decay_g * n_g
        q_m = base.decay_m * n_m
        q_l = base.decay_l * n_l - base.branch_gl * n_g - base.branch_ml * n_m
        q_n = base.decay_n * n_n - base.branch_gn * n_g - base.branch_mn * n_m
        pumps = {"pump_l": q_l, "pump_g": q_g, "pump_n": q_n, "pump_m": q_m}
        scale = max(abs(v) for v in pumps.values()) or 1.0
        bad = [k for k, v in pumps.items() if v < -1e-12 * scale]
        if bad:
            raise ValidationError(f"populations need negative pumping: {', '.join(bad)}")
        return dataclasses.replace(base, **{k: max(v, 0.0) for k, v in pumps.items()})

    @classmethod
    def spontaneous(cls, *, decay_l: float, decay_g: float, decay_n: float,
                    decay_m: float, extra_width: float = 0.0, **kw: float) -> "LevelScheme":
        """Scheme with halfwidths ``(Γ_i + Γ_j)/2 + extra_width``."""
        d = {"l": decay_l, "g": decay_g, "n": decay_n, "m": decay_m}
        widths = {name: 0.5 * (d[name[-2]] + d[name[-1]]) + extra_width for name in WIDTHS}
        widths.update({k: v for k, v in kw.items() if k in widths})
        rest = {k: v for k, v in kw.items() if k not in widths}
        return cls(decay_l=decay_l, decay_g=decay_g, decay_n=decay_n,
                   decay_m=decay_m, **widths, **rest)

    # Field-free populations of the rate equations.
    @property
    def n_g(self) -> float:
        return self.pump_g / self.decay_g

    @property
    def n_m(self) -> float:
        return self.pump_m / self.decay_m

    @property
    def n_l(self) -> float:
        return (self.pump_l + self.branch_gl * self.n_g + self.branch_ml * self.n_m) / self.decay_l

    @property
    def n_n(self) -> float:
        return (self.pump_n + self.branch_gn * self.n_g + self.branch_mn * self.n_m) / self.decay_n

    def unperturbed(self) -> "Populations":
        """Field-free populations as a :class:`Populations` record."""
        return Populations(self.n_l, self.n_g, self.n_n, self.n_m)


@dataclass(frozen=True)
class Populations:
    """Per-atom populations of levels l, g, n, m."""

    r_l: float
    r_g: float
    r_n: float
    r_m: float

    @property
    def dr1(self) -> float:
        return self.r_l - self.r_g

    @property
    def dr2(self) -> float:
        return self.r_n - self.r_g

    @property
    def dr3(self) -> float:
        return self.r_n - self.r_m

    @property
    def dr4(self) -> float:
        return self.r_l - self.r_m

    @property
    def total(self) -> float:
        return self.r_l + self.r_g + self.r_n + self.r_m


@dataclass(frozen=True)
class ValidationReport:
    """Every invariant a :class:`LevelScheme` violates; empty when valid."""

    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:  # truthy when valid
        return self.ok

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def validate_scheme(scheme: LevelScheme) -> ValidationReport:
    """List every violated invariant of ``scheme``."""
    out = []
    for f in dataclasses.fields(scheme):
        value = getattr(scheme, f.name)
        if not np.isfinite(value):
            out.append(f"{f.name}: non-finite value")
        elif value < 0:
            out.append(f"{f.name}: negative rate")
    for name in WIDTHS:
        if getattr(scheme, name) == 0:
            out.append(f"{name}: zero coherence width")
    for level in LEVELS:
        if getattr(scheme, f"decay_{level}") == 0:
            out.append(f"decay_{level}: zero total decay leaves the open-scheme population undefined")
    for name, (upper, _lower) in BRANCHES.items():
        if getattr(scheme, name) > getattr(scheme, f"decay_{upper}"):
            out.append(f"{name}: partial exceeds total decay_{upper}")
    for upper in ("g", "m"):
        partial = sum(getattr(scheme, n) for n, (u, _) in BRANCHES.items() if u == upper)
        total = getattr(scheme, f"decay_{upper}")
        if partial > total * (1 + 1e-12):
            out.append(f"decay_{upper}: partial rates sum exceeds total")
    return ValidationReport(tuple(out))


def ensure_valid(scheme: LevelScheme) -> None:
    """Raise :class:`ValidationError` listing all violations, if any."""
    report = validate_scheme(scheme)
    if not report.ok:
        raise ValidationError("invalid level scheme: " + "; ".join(report.violations))


@dataclass(frozen=True)
class FieldSet:
    """Complex Rabi frequencies and detunings of up to four fields.

    Parameters
    ----------
    g1, g2, g3, g4 : complex
        Rabi frequencies on transitions l-g, n-g, n-m, l-m.
    omega1, omega2, omega3, omega4 : float or ndarray
        Detunings from the respective resonances. Arrays broadcast.
    flipped : tuple of bool
        Per-field cascade flag. A flipped field enters with the sign of its
        detuning reversed and its Rabi frequency conjugated, which maps a
        cascade arrangement of that transition onto the V/Lambda loop.
    """

    g1: complex = 0.0
    g2: complex = 0.0
    g3: complex = 0.0
    g4: complex = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    omega3: float = 0.0
    omega4: float = 0.0
    flipped: Tuple[bool, bool, bool, bool] = field(default=(False, False, False, False))

    def __post_init__(self):
        for name in ("g1", "g2", "g3", "g4", "omega1", "omega2", "omega3", "omega4"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValidationError(f"{name}: non-finite value")
        if len(self.flipped) != 4:
            raise ValidationError("flipped must have four entries")

    def effective(self) -> "FieldSet":
        """Apply the cascade flags and return an unflagged field set."""
        if not any(self.flipped):
            return self
        kw = {}
        for i, flip in enumerate(self.flipped, start=1):
            g = getattr(self, f"g{i}")
            w = getattr(self, f"omega{i}")
            kw[f"g{i}"] = np.conj(g) if flip else g
            kw[f"omega{i}"] = -np.asarray(w) if flip else w
        return FieldSet(**kw)

    def replace(self, **kw) -> "FieldSet":
        return dataclasses.replace(self, **kw)


def probe_safe(scheme: LevelScheme, fields: FieldSet, which: int,
               threshold: float = 1e-3) -> bool:
    """Whether field ``which`` is weak enough for the probe solvers.

    The criterion is ``|G|^2 / (Γ_a Γ_b) < threshold`` with Γ_a, Γ_b the
    total decay rates of the two coupled levels. When that product is zero
    the squared transition halfwidth is used instead.
    """
    pairs = {1: ("l", "g", "width_lg"), 2: ("n", "g", "width_ng"),
             3: ("n", "m", "width_nm"), 4: ("l", "m", "width_lm")}
    a, b, width = pairs[which]
    scale = getattr(scheme, f"decay_{a}") * getattr(scheme, f"decay_{b}")
    if scale == 0:
        scale = getattr(scheme, width) ** 2
    g = getattr(fields, f"g{which}")
    return bool(abs(g) ** 2 < threshold * scale)


@dataclass(frozen=True)
class ComplexDenominators:
    """Resonance denominators ``Γ + i·detuning`` of the four-level loop."""

    p1: complex
    p2: complex
    p3: complex
    p4: complex
    p12: complex
    p43: complex
    p32: complex
    p41: complex
    d2: complex
    d4: complex


def build_denominators(scheme: LevelScheme, fields: FieldSet) -> ComplexDenominators:
    """Evaluate every complex denominator for ``scheme`` and ``fields``.

    Cascade flags on ``fields`` are honoured. Detuning arrays broadcast.
    """
    f = fields.effective()
    w1, w2, w3, w4 = (np.asarray(getattr(f, f"omega{i}"), dtype=float) for i in range(1, 5))
    s = scheme
    return ComplexDenominators(
        p1=s.width_lg + 1j * w1,
        p2=s.width_ng + 1j * w2,
        p3=s.width_nm + 1j * w3,
        p4=s.width_lm + 1j * w4,
        p12=s.width_ln + 1j * (w1 - w2),
        p43=s.width_ln + 1j * (w4 - w3),
        p32=s.width_gm + 1j * (w3 - w2),
        p41=s.width_gm + 1j * (w4 - w1),
        d2=s.width_ng + 1j * (w1 + w3 - w4),
        d4=s.width_lm + 1j * (w1 - w2 + w3),
    )
