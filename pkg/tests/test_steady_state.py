import math

import numpy as np
import pytest

from atomcoherence.errors import SingularDenominator, ValidationError
from atomcoherence.scheme import FieldSet, LevelScheme, Populations, build_denominators
from atomcoherence.steady_state import (_two_strong_coefficients, interference_factors,
                                        oracle_solve, saturated_populations, solve_closed_form,
                                        solve_two_strong, two_strong_populations,
                                        weak_probe_reduction, coherence_ratios)

from conftest import random_fields, random_scheme


def _max_rel(a, b):
    worst = 0.0
    for k in a:
        worst = max(worst, abs(a[k] - b[k]) / max(abs(b[k]), 1e-300))
    return worst


def test_closed_form_matches_oracle_on_random_draws(rng):
    worst = 0.0
    for _ in range(100):
        s, f = random_scheme(rng), random_fields(rng)
        a = solve_closed_form(s, f, check_probe=False).as_dict()
        b = oracle_solve(s, f).as_dict()
        worst = max(worst, _max_rel(a, b))
    assert worst < 1e-9


def test_population_identities(rng):
    s, f = random_scheme(rng), random_fields(rng)
    st = solve_closed_form(s, f, check_probe=False)
    assert st.dr1 == st.r_l - st.r_g and st.dr3 == st.r_n - st.r_m
    assert min(st.r_l, st.r_g, st.r_n, st.r_m) >= 0


def test_g3_zero_reduces_to_weak_probe_form(rng):
    for _ in range(50):
        s, f = random_scheme(rng), random_fields(rng).replace(g3=0.0)
        pops = saturated_populations(s, f)
        R2, R4 = coherence_ratios(s, f, pops)
        W2, W4 = weak_probe_reduction(s, f, pops)
        assert abs(R2 - W2) <= 1e-12 * abs(W2)
        assert abs(R4 - W4) <= 1e-12 * abs(W4)


def test_bare_lorentzian_without_strong_fields(rng):
    s = random_scheme(rng)
    f = FieldSet(g2=1e-4, omega2=0.7)
    st = solve_closed_form(s, f)
    n = s.unperturbed()
    assert st.r2 == pytest.approx(1j * f.g2 * n.dr2 / (s.width_ng + 0.7j), rel=1e-14)


def test_strong_probe_is_rejected(unit_scheme):
    with pytest.raises(ValidationError):
        solve_closed_form(unit_scheme, FieldSet(g2=1.0))


def test_negating_detunings_conjugates_coherences(rng):
    # Conjugating the equations maps Ω -> -Ω together with G -> -G*.
    s, f = random_scheme(rng), random_fields(rng)
    neg = f.replace(g1=-np.conj(f.g1), g2=-np.conj(f.g2), g3=-np.conj(f.g3), g4=-np.conj(f.g4),
                    **{f"omega{i}": -getattr(f, f"omega{i}") for i in range(1, 5)})
    a = oracle_solve(s, f).as_dict()
    b = oracle_solve(s, neg).as_dict()
    for k in a:
        assert b[k] == pytest.approx(np.conj(a[k]), rel=1e-10, abs=1e-14)


def test_field_free_populations_are_stationary(rng):
    s = random_scheme(rng)
    st = oracle_solve(s, FieldSet(g2=1e-5, g4=1e-5))
    n = s.unperturbed()
    assert (st.r_l, st.r_g, st.r_n, st.r_m) == pytest.approx((n.r_l, n.r_g, n.r_n, n.r_m), rel=1e-12)


def test_closed_subsystem_conserves_population():
    # Every level leaks to a reservoir at the same rate and upper levels
    # otherwise decay only into lower ones, so Σr = Σq/γ0 whatever the fields.
    g0 = 0.2
    s = LevelScheme(decay_l=g0, decay_g=2.0 + g0, decay_n=g0, decay_m=2.0 + g0,
                    width_lg=1.5, width_ng=1.5, width_nm=1.5, width_lm=1.5, width_ln=1.0,
                    width_gm=2.0, branch_gl=1.0, branch_gn=1.0, branch_ml=1.0, branch_mn=1.0,
                    pump_l=0.03, pump_n=0.07)
    totals = []
    for g1, g3 in [(0, 0), (1, 0), (0, 2), (3, 4), (5, 5)]:
        p = saturated_populations(s, FieldSet(g1=g1, g3=g3, omega1=0.3, omega3=-0.2))
        totals.append(p.total)
    assert totals[0] == pytest.approx(0.1 / g0, rel=1e-12)
    assert np.ptp(totals) < 1e-10


def test_saturation_is_monotone_in_g1(rng):
    s = random_scheme(rng)
    drs = [saturated_populations(s, FieldSet(g1=g)).dr1 for g in np.linspace(0, 10, 41)]
    n = s.unperturbed()
    sign = np.sign(n.dr1)
    assert np.all(np.diff(sign * np.array(drs)) <= 1e-14)


def test_singular_population_determinant_detected(unit_scheme):
    with pytest.raises(SingularDenominator):
        fac = interference_factors(unit_scheme, FieldSet(g1=1.0))
        fac = fac.__class__(**{**fac.__dict__, "kappa1": -1.0})
        saturated_populations(unit_scheme, FieldSet(g1=1.0), fac)


# -- two strong fields --------------------------------------------------------

def _two_strong_oracle(s, f, dr3, dr4):
    """Solve the three coupled amplitude equations as a real 6x6 system.

    P4 r4 = iG4Δr4 + iG3 r43, P3 r3 = iG3Δr3 + iG4 conj(r43),
    P43 r43 = iG3* r4 - iG4 conj(r3).
    """
    d = build_denominators(s, f)
    g3, g4 = f.g3, f.g4

    def residual(x):
        r3, r4, r43 = x[0] + 1j * x[1], x[2] + 1j * x[3], x[4] + 1j * x[5]
        e = [d.p4 * r4 - 1j * g4 * dr4 - 1j * g3 * r43,
             d.p3 * r3 - 1j * g3 * dr3 - 1j * g4 * np.conj(r43),
             d.p43 * r43 - 1j * np.conj(g3) * r4 + 1j * g4 * np.conj(r3)]
        return [v for z in e for v in (z.real, z.imag)]

    # The residual is affine in x: build the matrix column by column.
    r0 = np.array(residual(np.zeros(6)))
    a = np.column_stack([np.array(residual(e)) - r0 for e in np.eye(6)])
    x = np.linalg.solve(a, -r0)
    return x[0] + 1j * x[1], x[2] + 1j * x[3]


def test_two_strong_matches_amplitude_oracle(rng):
    for _ in range(30):
        s = random_scheme(rng)
        f = FieldSet(g3=rng.uniform(0, 5) * np.exp(1j * rng.uniform(0, 6)),
                     g4=rng.uniform(0, 5) * np.exp(1j * rng.uniform(0, 6)),
                     omega3=rng.uniform(-10, 10), omega4=rng.uniform(-10, 10))
        pops = Populations(0.5, 0.1, 0.3, 0.1)
        r3, r4 = solve_two_strong(s, f, pops)
        o3, o4 = _two_strong_oracle(s, f, pops.dr3, pops.dr4)
        assert r3 == pytest.approx(o3, rel=1e-10)
        assert r4 == pytest.approx(o4, rel=1e-10)


def test_two_strong_weak_probe_limit(rng):
    s = random_scheme(rng)
    pops = Populations(0.5, 0.1, 0.3, 0.1)
    f = FieldSet(g3=2.0, g4=1e-7, omega3=0.4, omega4=-0.3)
    _, r4 = solve_two_strong(s, f, pops)
    _, W4 = weak_probe_reduction(s, f.replace(g1=0.0), pops)
    # Weak-probe form with the subscript mapping of the l-m probe: R4 = (Δr4 - v1 Δr3)/(1+v4)
    fac = interference_factors(s, f)
    R4 = (pops.dr4 - fac.v[1] * pops.dr3) / (1 + fac.v[4])
    d = build_denominators(s, f)
    assert r4 / f.g4 == pytest.approx(1j * R4 / d.p4, rel=1e-6)


def test_two_strong_no_fields_limit(unit_scheme):
    pops = Populations(0.5, 0.1, 0.3, 0.1)
    f = FieldSet(g4=1e-9, omega4=0.5)
    _, r4 = solve_two_strong(unit_scheme, f, pops)
    assert r4 == pytest.approx(1j * f.g4 * pops.dr4 / (unit_scheme.width_lm + 0.5j), rel=1e-12)


def test_swapping_transitions_exchanges_coherences(rng):
    s = random_scheme(rng)
    swapped = LevelScheme(**{**s.__dict__, "width_nm": s.width_lm, "width_lm": s.width_nm})
    f = FieldSet(g3=1.3 + 0.4j, g4=0.7 - 0.9j, omega3=0.8, omega4=-1.1)
    g = FieldSet(g3=f.g4, g4=f.g3, omega3=f.omega4, omega4=f.omega3)
    pops = Populations(0.5, 0.1, 0.3, 0.1)
    swapped_pops = Populations(r_l=pops.r_n, r_g=pops.r_g, r_n=pops.r_l, r_m=pops.r_m)
    r3, r4 = solve_two_strong(s, f, pops)
    q3, q4 = solve_two_strong(swapped, g, swapped_pops)
    assert q3 == pytest.approx(r4, rel=1e-12)
    assert q4 == pytest.approx(r3, rel=1e-12)


def test_two_strong_requires_absent_fields(unit_scheme):
    with pytest.raises(ValidationError):
        solve_two_strong(unit_scheme, FieldSet(g1=0.1, g3=1, g4=1))


def test_two_strong_populations_are_self_consistent(rng):
    s = random_scheme(rng)
    f = FieldSet(g3=2.0, g4=1.5, omega3=0.3, omega4=-0.6)
    p = two_strong_populations(s, f)
    c3, c4 = _two_strong_coefficients(s, f)

    def rates(x):
        r_l, r_g, r_n, r_m = x
        dr3, dr4 = r_n - r_m, r_l - r_m
        r3 = c3[0] * dr3 + c3[1] * dr4
        r4 = c4[0] * dr3 + c4[1] * dr4
        w3 = 2 * np.imag(np.conj(f.g3) * r3)
        w4 = 2 * np.imag(np.conj(f.g4) * r4)
        return [s.pump_l - s.decay_l * r_l + s.branch_gl * r_g + s.branch_ml * r_m - w4,
                s.pump_g - s.decay_g * r_g,
                s.pump_n - s.decay_n * r_n + s.branch_gn * r_g + s.branch_mn * r_m - w3,
                s.pump_m - s.decay_m * r_m + w3 + w4]

    scale = max(s.pump_l, s.pump_g, s.pump_n, s.pump_m)
    assert np.max(np.abs(rates([p.r_l, p.r_g, p.r_n, p.r_m]))) < 1e-9 * scale
    # The balance is affine in the populations: solve it directly.
    r0 = np.array(rates(np.zeros(4)))
    a = np.column_stack([np.array(rates(e)) - r0 for e in np.eye(4)])
    ref = np.linalg.solve(a, -r0)
    assert (p.r_l, p.r_g, p.r_n, p.r_m) == pytest.approx(tuple(ref), rel=1e-8, abs=1e-12)
