"""Steady-state density matrix of the open four-level loop.

Two independent routes are provided:

* :func:`solve_closed_form` evaluates the analytic solution (interference
  factors ``g_i``, ``v_i``, saturation parameters ``κ`` and branching
  factors ``a_i``, ``b_i``).
* :func:`oracle_solve` assembles the stationary density-matrix equations
  directly as a real linear system and solves it numerically.

The probe fields ``G_2`` and ``G_4`` are treated to first order; the strong
fields ``G_1`` and ``G_3`` to all orders. Slowly varying amplitudes are
defined by ``ρ_lg = r_1 e^{iΩ_1 t}`` and so on, with the interaction
``V_lg = G_1 e^{iΩ_1 t}``, ``V_ng = G_2 e^{iΩ_2 t}``, ``V_nm = G_3 e^{iΩ_3 t}``
and ``V_lm = G_4 e^{iΩ_4 t}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (ConvergenceError, NonPhysical, SingularDenominator,
                     SingularSystem, ValidationError)
from .scheme import (ComplexDenominators, FieldSet, LevelScheme, Populations,
                     build_denominators, ensure_valid, probe_safe)

_DET_TOL = 1e-12
_NEG_TOL = 1e-9


@dataclass(frozen=True)
class InterferenceFactors:
    """Dimensionless factors entering the closed-form solution.

    ``g[i]`` and ``v[i]`` hold ``g_i`` and ``v_i`` for ``i = 1..8`` (index 0
    is unused). ``u2`` and ``u3`` belong to the two-strong-field solution
    and are zero unless ``G_4`` is set.
    """

    g: Tuple[complex, ...]
    v: Tuple[complex, ...]
    u2: complex
    u3: complex
    kappa1: float
    kappa3: float
    kappa1_0: float
    kappa3_0: float
    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float


@dataclass(frozen=True)
class SteadyState:
    """Populations and slowly varying coherence amplitudes.

    Attributes
    ----------
    populations : Populations
        Saturated populations ``r_l, r_g, r_n, r_m``.
    r1, r2, r3, r4 : complex
        One-photon coherences on transitions l-g, n-g, n-m, l-m.
    rt2, rt4 : complex
        Mixing amplitudes (``ρ_ng`` and ``ρ_lm`` components oscillating at
        the combination frequencies ``ω_1+ω_3-ω_4`` and ``ω_1-ω_2+ω_3``).
    r12, r32, r41, r43 : complex
        Two-photon coherences on the forbidden transitions l-n and g-m.
    """

    populations: Populations
    r1: complex
    r2: complex
    r3: complex
    r4: complex
    rt2: complex
    rt4: complex
    r12: complex
    r32: complex
    r41: complex
    r43: complex

    @property
    def r_l(self):
        return self.populations.r_l

    @property
    def r_g(self):
        return self.populations.r_g

    @property
    def r_n(self):
        return self.populations.r_n

    @property
    def r_m(self):
        return self.populations.r_m

    @property
    def dr1(self):
        return self.populations.dr1

    @property
    def dr2(self):
        return self.populations.dr2

    @property
    def dr3(self):
        return self.populations.dr3

    @property
    def dr4(self):
        return self.populations.dr4

    def as_dict(self) -> dict:
        """Every component keyed by name, populations included."""
        out = {k: getattr(self, k) for k in ("r_l", "r_g", "r_n", "r_m")}
        for k in ("r1", "r2", "r3", "r4", "rt2", "rt4", "r12", "r32", "r41", "r43"):
            out[k] = getattr(self, k)
        return out


# ---------------------------------------------------------------------------
# closed form

def branching_factors(scheme: LevelScheme) -> Tuple[float, ...]:
    """Return ``(a1, a2, a3, b1, b2, b3)`` for the saturated populations."""
    s = scheme
    den_a = s.decay_l + s.decay_g - s.branch_gl
    den_b = s.decay_m + s.decay_n - s.branch_mn
    a1 = s.branch_gn * s.decay_l / (s.decay_n * den_a)
    a2 = s.decay_l * (s.decay_n - s.branch_gn) / (s.decay_n * den_a)
    a3 = (s.decay_g - s.branch_gl) / den_a
    b1 = s.branch_ml * s.decay_n / (s.decay_l * den_b)
    b2 = (s.decay_m - s.branch_mn) / den_b
    b3 = s.decay_n * (s.decay_l - s.branch_ml) / (s.decay_l * den_b)
    return a1, a2, a3, b1, b2, b3


def interference_factors(scheme: LevelScheme, fields: FieldSet,
                         den: Optional[ComplexDenominators] = None) -> InterferenceFactors:
    """Compute all ``g_i``, ``v_i``, ``u_i``, ``κ`` and branching factors."""
    f = fields.effective()
    d = den if den is not None else build_denominators(scheme, f)
    c = np.conj
    s1 = abs(f.g1) ** 2
    s3 = abs(f.g3) ** 2
    s4 = abs(f.g4) ** 2
    g = (0j,
         s1 / (d.p41 * c(d.p1)), s1 / (c(d.p12) * d.p2), s1 / (c(d.p12) * c(d.p1)),
         s1 / (d.p41 * d.p4), s1 / (d.p43 * c(d.d2)), s1 / (d.p41 * c(d.d2)),
         s1 / (c(d.p32) * c(d.d4)), s1 / (c(d.p12) * c(d.d4)))
    v = (0j,
         s3 / (d.p43 * c(d.p3)), s3 / (c(d.p32) * d.p2), s3 / (c(d.p32) * c(d.p3)),
         s3 / (d.p43 * d.p4), s3 / (d.p41 * c(d.d2)), s3 / (d.p43 * c(d.d2)),
         s3 / (c(d.p12) * c(d.d4)), s3 / (c(d.p32) * c(d.d4)))
    u2 = s4 / (d.p3 * c(d.p43))
    u3 = s4 / (c(d.p4) * c(d.p43))
    sc = scheme
    k1_0 = 2 * (sc.decay_l + sc.decay_g - sc.branch_gl) * s1 / (sc.decay_l * sc.decay_g * sc.width_lg)
    k3_0 = 2 * (sc.decay_m + sc.decay_n - sc.branch_mn) * s3 / (sc.decay_m * sc.decay_n * sc.width_nm)
    k1 = k1_0 * sc.width_lg ** 2 / np.abs(d.p1) ** 2
    k3 = k3_0 * sc.width_nm ** 2 / np.abs(d.p3) ** 2
    return InterferenceFactors(g, v, u2, u3, k1, k3, k1_0, k3_0, *branching_factors(scheme))


def saturated_populations(scheme: LevelScheme, fields: FieldSet,
                          fac: Optional[InterferenceFactors] = None) -> Populations:
    """Populations saturated by the strong fields ``G_1`` and ``G_3``."""
    ensure_valid(scheme)
    if fac is None:
        fac = interference_factors(scheme, fields)
    n = scheme.unperturbed()
    k1, k3 = fac.kappa1, fac.kappa3
    det = (1 + k1) * (1 + k3) - fac.a1 * k1 * fac.b1 * k3
    if np.any(np.abs(det) < _DET_TOL):
        raise SingularDenominator("population determinant vanishes")
    dr1 = ((1 + k3) * n.dr1 + fac.b1 * k3 * n.dr3) / det
    dr3 = ((1 + k1) * n.dr3 + fac.a1 * k1 * n.dr1) / det
    pops = Populations(
        r_l=n.r_l - fac.a3 * k1 * dr1 + fac.b1 * k3 * dr3,
        r_g=n.r_g + (1 - fac.a3) * k1 * dr1,
        r_n=n.r_n - fac.b2 * k3 * dr3 + fac.a1 * k1 * dr1,
        r_m=n.r_m + (1 - fac.b2) * k3 * dr3,
    )
    scale = max(abs(n.r_l), abs(n.r_g), abs(n.r_n), abs(n.r_m), 1e-300)
    for name in ("r_l", "r_g", "r_n", "r_m"):
        if np.any(np.asarray(getattr(pops, name)) < -_NEG_TOL * scale):
            raise NonPhysical(f"negative population {name}")
    return pops


def coherence_ratios(scheme: LevelScheme, fields: FieldSet, populations: Populations,
                     fac: Optional[InterferenceFactors] = None):
    """Return ``(R_2, R_4)`` with ``r_{2,4} = i G_{2,4} R_{2,4} / P_{2,4}``.

    Populations are taken as given, so this also serves spectra computed
    at fixed saturation. All inputs broadcast.
    """
    if fac is None:
        fac = interference_factors(scheme, fields)
    g, v = fac.g, fac.v
    p = populations
    num2 = (p.dr2 * (1 + g[7] + v[7]) - v[3] * (1 + v[7] - g[8]) * p.dr3
            - g[3] * (1 + g[7] - v[8]) * p.dr1)
    den2 = (1 + g[2] + v[2]) + (g[7] + g[2] * (g[7] - v[8]) + v[7] + v[2] * (v[7] - g[8]))
    num4 = (p.dr4 * (1 + v[5] + g[5]) - g[1] * (1 + g[5] - v[6]) * p.dr1
            - v[1] * (1 + v[5] - g[6]) * p.dr3)
    den4 = (1 + g[4] + v[4]) + (v[5] + v[4] * (v[5] - g[6]) + g[5] + g[4] * (g[5] - v[6]))
    return num2 / den2, num4 / den4


def weak_probe_reduction(scheme: LevelScheme, fields: FieldSet, populations: Populations):
    """Lambda/V-scheme ratios ``(R_2, R_4)`` valid when ``G_3 = 0``.

    ``R_2 = (Δr_2 - g_3 Δr_1)/(1 + g_2)``, ``R_4 = (Δr_4 - g_1 Δr_1)/(1 + g_4)``.
    """
    fac = interference_factors(scheme, fields)
    g, p = fac.g, populations
    return (p.dr2 - g[3] * p.dr1) / (1 + g[2]), (p.dr4 - g[1] * p.dr1) / (1 + g[4])


def solve_closed_form(scheme: LevelScheme, fields: FieldSet, *,
                      populations: Optional[Populations] = None,
                      check_probe: bool = True) -> SteadyState:
    """Closed-form steady state.

    Parameters
    ----------
    scheme, fields
        System and fields. ``G_2`` and ``G_4`` must be probe-safe unless
        ``check_probe`` is False (the result is linear in them anyway).
    populations : Populations, optional
        Override the saturated populations, e.g. to hold them fixed.

    Returns
    -------
    SteadyState
    """
    ensure_valid(scheme)
    f = fields.effective()
    if check_probe:
        for i in (2, 4):
            if not probe_safe(scheme, f, i):
                raise ValidationError(f"g{i}: probe field exceeds the weak-field threshold")
    d = build_denominators(scheme, f)
    fac = interference_factors(scheme, f, d)
    pops = populations if populations is not None else saturated_populations(scheme, f, fac)
    R2, R4 = coherence_ratios(scheme, f, pops, fac)
    c = np.conj
    g1, g2, g3, g4 = f.g1, f.g2, f.g3, f.g4
    r1 = 1j * g1 * pops.dr1 / d.p1
    r3 = 1j * g3 * pops.dr3 / d.p3
    r2 = 1j * g2 * R2 / d.p2
    r4 = 1j * g4 * R4 / d.p4
    s1, s3 = abs(g1) ** 2, abs(g3) ** 2

    # Probe-2 block: eliminate r12 and r32 in favour of the mixing amplitude.
    lhs = d.d4 + s1 / d.p32 + s3 / d.p12
    rhs = g1 * g3 * c(r2) * (1 / d.p32 + 1 / d.p12) - c(g2) * (g1 * r3 / d.p32 + g3 * r1 / d.p12)
    rt4 = rhs / lhs
    r12 = (-1j * g1 * c(r2) + 1j * c(g2) * r1 + 1j * c(g3) * rt4) / d.p12
    r32 = (-1j * c(g2) * r3 + 1j * g3 * c(r2) - 1j * c(g1) * rt4) / d.p32

    # Probe-4 block, written for the conjugate mixing amplitude.
    lhs = c(d.d2) + s3 / d.p41 + s1 / d.p43
    rhs = c(g1) * c(g3) * r4 * (1 / d.p41 + 1 / d.p43) - g4 * (c(g3) * c(r1) / d.p41 + c(g1) * c(r3) / d.p43)
    rt2 = c(rhs / lhs)
    r41 = (-1j * c(g1) * r4 + 1j * g4 * c(r1) + 1j * g3 * c(rt2)) / d.p41
    r43 = (1j * c(g3) * r4 - 1j * g4 * c(r3) - 1j * g1 * c(rt2)) / d.p43
    return SteadyState(pops, r1, r2, r3, r4, rt2, rt4, r12, r32, r41, r43)


# ---------------------------------------------------------------------------
# oracle

class _RealLinearSystem:
    """Linear equations in complex unknowns that may appear conjugated.

    Each row is ``Σ a_k x_k + b_k conj(x_k) = c``; the system is expanded
    into real and imaginary parts and solved as a dense real system.
    """

    def __init__(self, names):
        self.index = {name: i for i, name in enumerate(names)}
        n = len(names)
        self.a = np.zeros((2 * n, 2 * n))
        self.rhs = np.zeros(2 * n)
        self.row = 0

    def add(self, terms, const=0.0):
        r = 2 * self.row
        for name, coef, conj in terms:
            k = 2 * self.index[name]
            coef = complex(coef)
            if conj:
                self.a[r, k] += coef.real
                self.a[r, k + 1] += coef.imag
                self.a[r + 1, k] += coef.imag
                self.a[r + 1, k + 1] -= coef.real
            else:
                self.a[r, k] += coef.real
                self.a[r, k + 1] -= coef.imag
                self.a[r + 1, k] += coef.imag
                self.a[r + 1, k + 1] += coef.real
        const = complex(const)
        self.rhs[r] = const.real
        self.rhs[r + 1] = const.imag
        self.row += 1

    def solve(self) -> dict:
        if self.row != len(self.index):
            raise SingularSystem("equation count does not match unknown count")
        cond = np.linalg.cond(self.a)
        if not np.isfinite(cond) or cond > 1e14:
            raise SingularSystem(f"assembled system is singular (condition number {cond:.3g})")
        x = np.linalg.solve(self.a, self.rhs)
        return {name: x[2 * i] + 1j * x[2 * i + 1] for name, i in self.index.items()}


_UNKNOWNS = ("r_l", "r_g", "r_n", "r_m", "r1", "r3", "r2", "rt2", "r4", "rt4",
             "r12", "r43", "r32", "r41")


def oracle_solve(scheme: LevelScheme, fields: FieldSet) -> SteadyState:
    """Solve the stationary density-matrix equations by dense linear algebra.

    The unknowns are the four populations and ten coherence amplitudes.
    Terms of second order in the probe fields are dropped, so populations
    are set by the strong fields alone. Nothing from the closed form is used.
    """
    ensure_valid(scheme)
    f = fields.effective()
    for name in ("omega1", "omega2", "omega3", "omega4"):
        if np.ndim(getattr(f, name)) != 0:
            raise ValidationError("oracle_solve takes scalar detunings only")
    s = scheme
    G1, G2, G3, G4 = (complex(getattr(f, f"g{i}")) for i in range(1, 5))
    c = np.conj
    d = build_denominators(s, f)
    eq = _RealLinearSystem(_UNKNOWNS)
    # strong coherences
    eq.add([("r1", d.p1, False), ("r_l", -1j * G1, False), ("r_g", 1j * G1, False)])
    eq.add([("r3", d.p3, False), ("r_n", -1j * G3, False), ("r_m", 1j * G3, False)])
    # rate balances; the field term moving population between a and b is
    # ±2 Re(i G* r) written as (i G* r - i G conj(r)).
    eq.add([("r_g", s.decay_g, False), ("r1", 1j * c(G1), False), ("r1", -1j * G1, True)], s.pump_g)
    eq.add([("r_m", s.decay_m, False), ("r3", 1j * c(G3), False), ("r3", -1j * G3, True)], s.pump_m)
    eq.add([("r_n", s.decay_n, False), ("r3", -1j * c(G3), False), ("r3", 1j * G3, True),
            ("r_g", -s.branch_gn, False), ("r_m", -s.branch_mn, False)], s.pump_n)
    eq.add([("r_l", s.decay_l, False), ("r1", -1j * c(G1), False), ("r1", 1j * G1, True),
            ("r_g", -s.branch_gl, False), ("r_m", -s.branch_ml, False)], s.pump_l)
    # probe at ω_2 and its loop partners
    eq.add([("r2", d.p2, False), ("r_n", -1j * G2, False), ("r_g", 1j * G2, False),
            ("r32", 1j * G3, True), ("r12", -1j * G1, True)])
    eq.add([("r12", d.p12, False), ("r2", 1j * G1, True), ("r1", -1j * c(G2), False),
            ("rt4", -1j * c(G3), False)])
    eq.add([("r32", d.p32, False), ("r3", 1j * c(G2), False), ("r2", -1j * G3, True),
            ("rt4", 1j * c(G1), False)])
    eq.add([("rt4", d.d4, False), ("r32", 1j * G1, False), ("r12", -1j * G3, False)])
    # probe at ω_4 and its loop partners
    eq.add([("r4", d.p4, False), ("r_l", -1j * G4, False), ("r_m", 1j * G4, False),
            ("r41", 1j * G1, False), ("r43", -1j * G3, False)])
    eq.add([("r41", d.p41, False), ("r4", 1j * c(G1), False), ("r1", -1j * G4, True),
            ("rt2", -1j * G3, True)])
    eq.add([("r43", d.p43, False), ("r4", -1j * c(G3), False), ("r3", 1j * G4, True),
            ("rt2", 1j * G1, True)])
    eq.add([("rt2", d.d2, False), ("r41", 1j * G3, True), ("r43", -1j * G1, True)])
    x = eq.solve()
    pops = Populations(*(x[k].real for k in ("r_l", "r_g", "r_n", "r_m")))
    return SteadyState(pops, *(x[k] for k in ("r1", "r2", "r3", "r4", "rt2", "rt4",
                                               "r12", "r32", "r41", "r43")))


# ---------------------------------------------------------------------------
# two strong fields on n-m and l-m

def solve_two_strong(scheme: LevelScheme, fields: FieldSet,
                     populations: Optional[Populations] = None) -> Tuple[complex, complex]:
    """Coherences ``(r_3, r_4)`` when ``E_3`` and ``E_4`` are both strong.

    Parameters
    ----------
    scheme, fields
        ``G_1`` and ``G_2`` must vanish.
    populations : Populations, optional
        Population differences ``Δr_3``, ``Δr_4`` are read from here. When
        omitted they are found self-consistently with
        :func:`two_strong_populations`.
    """
    ensure_valid(scheme)
    f = fields.effective()
    if f.g1 != 0 or f.g2 != 0:
        raise ValidationError("two-strong-field solution requires g1 = g2 = 0")
    if populations is None:
        populations = two_strong_populations(scheme, f)
    c3, c4 = _two_strong_coefficients(scheme, f)
    dr3, dr4 = populations.dr3, populations.dr4
    return c3[0] * dr3 + c3[1] * dr4, c4[0] * dr3 + c4[1] * dr4


def _two_strong_coefficients(scheme: LevelScheme, f: FieldSet):
    """Linear maps ``r_3 = c3·(Δr_3, Δr_4)`` and ``r_4 = c4·(Δr_3, Δr_4)``."""
    d = build_denominators(scheme, f)
    fac = interference_factors(scheme, f, d)
    c = np.conj
    v1, v4, u2, u3 = fac.v[1], fac.v[4], fac.u2, fac.u3
    den4 = 1 + v4 + c(u2)
    den3 = 1 + c(v4) + u2
    guard = _DET_TOL
    if np.any(np.abs(den4) < guard) or np.any(np.abs(den3) < guard):
        raise SingularDenominator("two-strong-field denominator vanishes")
    k4 = 1j * f.g4 / d.p4 / den4
    k3 = 1j * f.g3 / d.p3 / den3
    return (k3 * (1 + c(v4)), -k3 * u3), (-k4 * v1, k4 * (1 + c(u2)))


def two_strong_populations(scheme: LevelScheme, fields: FieldSet, *, damping: float = 0.5,
                           tol: float = 1e-10, max_iter: int = 10_000) -> Populations:
    """Self-consistent populations under two strong fields sharing level m.

    The coherences are linear in ``(Δr_3, Δr_4)``. Each sweep treats the
    direct saturation terms implicitly and the cross terms between the two
    transitions explicitly, then mixes old and new populations with the
    given damping.

    Raises
    ------
    ConvergenceError
        If the relative change does not fall below ``tol`` in ``max_iter``
        sweeps.
    """
    s = scheme
    f = fields.effective()
    c3, c4 = _two_strong_coefficients(s, f)
    # Transfer into m: W = -2 Re(i G* r) = 2 Im(G* r) for each transition.
    w33 = 2 * np.imag(np.conj(f.g3) * c3[0])
    w34 = 2 * np.imag(np.conj(f.g3) * c3[1])
    w43 = 2 * np.imag(np.conj(f.g4) * c4[0])
    w44 = 2 * np.imag(np.conj(f.g4) * c4[1])
    x = np.array([s.n_l, s.n_g, s.n_n, s.n_m])  # l, g, n, m
    scale = max(np.abs(x).max(), 1e-300)
    for _ in range(max_iter):
        dr3_old = x[2] - x[3]
        dr4_old = x[0] - x[3]
        a = np.zeros((4, 4))
        b = np.array([s.pump_l, s.pump_g, s.pump_n, s.pump_m], dtype=float)
        # W3 = w33 (r_n - r_m) + w34 Δr4_old ; W4 = w44 (r_l - r_m) + w43 Δr3_old
        a[3, 3] += s.decay_m
        a[3, 2] -= w33
        a[3, 3] += w33
        a[3, 0] -= w44
        a[3, 3] += w44
        b[3] += w34 * dr4_old + w43 * dr3_old
        a[1, 1] = s.decay_g
        a[2, 2] += s.decay_n + w33
        a[2, 3] -= w33
        a[2, 1] -= s.branch_gn
        a[2, 3] -= s.branch_mn
        b[2] -= w34 * dr4_old
        a[0, 0] += s.decay_l + w44
        a[0, 3] -= w44
        a[0, 1] -= s.branch_gl
        a[0, 3] -= s.branch_ml
        b[0] -= w43 * dr3_old
        new = np.linalg.solve(a, b)
        step = damping * (new - x)
        x = x + step
        if np.abs(step).max() <= tol * scale:
            return Populations(*x)
    raise ConvergenceError("two-strong-field populations did not converge")
