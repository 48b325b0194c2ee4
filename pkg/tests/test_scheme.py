import dataclasses

import numpy as np
import pytest

from atomcoherence.errors import ConfigError, ValidationError
from atomcoherence.scheme import (FieldSet, LevelScheme, build_denominators, ensure_valid,
                                  probe_safe, validate_scheme)
from atomcoherence.units import from_angular, parse_quantity, to_angular

from conftest import random_fields, random_scheme


def test_resonant_p1_equals_width(unit_scheme):
    s = dataclasses.replace(unit_scheme, width_lg=1.0)
    d = build_denominators(s, FieldSet(omega1=0.0))
    assert d.p1 == 1 + 0j


def test_two_photon_resonance_p12():
    s = LevelScheme.spontaneous(decay_l=1, decay_g=1, decay_n=1, decay_m=1, width_ln=2.0)
    d = build_denominators(s, FieldSet(omega1=3.3, omega2=3.3))
    assert d.p12 == 2 + 0j


def _independent_denominators(s, f):
    w1, w2, w3, w4 = f.omega1, f.omega2, f.omega3, f.omega4
    return {
        "p1": complex(s.width_lg, w1), "p2": complex(s.width_ng, w2),
        "p3": complex(s.width_nm, w3), "p4": complex(s.width_lm, w4),
        "p12": complex(s.width_ln, w1 - w2), "p43": complex(s.width_ln, w4 - w3),
        "p32": complex(s.width_gm, w3 - w2), "p41": complex(s.width_gm, w4 - w1),
        "d2": complex(s.width_ng, w1 + w3 - w4), "d4": complex(s.width_lm, w1 - w2 + w3),
    }


def test_denominators_match_independent_evaluation(rng):
    for _ in range(50):
        s, f = random_scheme(rng), random_fields(rng)
        d = build_denominators(s, f)
        for name, value in _independent_denominators(s, f).items():
            assert getattr(d, name) == pytest.approx(value, rel=1e-15, abs=0)


def test_real_parts_are_widths(rng):
    s, f = random_scheme(rng), random_fields(rng)
    d = build_denominators(s, f)
    assert d.p1.real == s.width_lg and d.p3.real == s.width_nm and d.p41.real == s.width_gm


def test_negating_detunings_conjugates_denominators(rng):
    s, f = random_scheme(rng), random_fields(rng)
    neg = f.replace(**{f"omega{i}": -getattr(f, f"omega{i}") for i in range(1, 5)})
    a, b = build_denominators(s, f), build_denominators(s, neg)
    for fld in dataclasses.fields(a):
        assert getattr(b, fld.name) == np.conj(getattr(a, fld.name))


def test_denominators_broadcast_over_grid(unit_scheme):
    grid = np.linspace(-5, 5, 11)
    d = build_denominators(unit_scheme, FieldSet(omega2=grid))
    assert d.p2.shape == (11,)
    assert np.allclose(d.p2.imag, grid)


def test_cascade_flag_flips_sign_and_conjugates():
    f = FieldSet(g1=1 + 2j, omega1=3.0, flipped=(True, False, False, False)).effective()
    assert f.g1 == 1 - 2j and f.omega1 == -3.0


def test_valid_scheme_has_empty_report(unit_scheme):
    rep = validate_scheme(unit_scheme)
    assert rep.ok and len(rep) == 0 and bool(rep)


def test_partial_exceeding_total_is_reported(unit_scheme):
    s = dataclasses.replace(unit_scheme, branch_gl=2.0)
    rep = validate_scheme(s)
    assert any("partial exceeds total" in v for v in rep)


def test_zero_coherence_width_is_reported(unit_scheme):
    s = dataclasses.replace(unit_scheme, width_lg=0.0)
    assert any("zero coherence width" in v for v in validate_scheme(s))
    with pytest.raises(ValidationError):
        ensure_valid(s)


def test_report_lists_every_violation(unit_scheme):
    s = dataclasses.replace(unit_scheme, width_lg=0.0, decay_n=-1.0)
    assert len(validate_scheme(s)) >= 2


def test_fieldset_rejects_nonfinite():
    with pytest.raises(ValidationError):
        FieldSet(g1=np.nan)


def test_from_populations_roundtrip():
    s = LevelScheme.from_populations(n_l=0.4, n_g=0.1, n_n=0.3, n_m=0.2, decay_l=1, decay_g=2,
                                     decay_n=1.5, decay_m=3, width_lg=1, width_ng=1, width_nm=1,
                                     width_lm=1, width_ln=1, width_gm=1, branch_gl=0.5,
                                     branch_ml=0.5, branch_gn=0.5, branch_mn=0.5)
    p = s.unperturbed()
    assert (p.r_l, p.r_g, p.r_n, p.r_m) == pytest.approx((0.4, 0.1, 0.3, 0.2), rel=1e-14)


def test_from_populations_rejects_negative_pump():
    with pytest.raises(ValidationError):
        LevelScheme.from_populations(n_l=0.0, n_g=1.0, n_n=0.0, n_m=0.0, decay_l=1, decay_g=1,
                                     decay_n=1, decay_m=1, width_lg=1, width_ng=1, width_nm=1,
                                     width_lm=1, width_ln=1, width_gm=1, branch_gl=0.5)


def test_probe_safe_threshold(unit_scheme):
    assert probe_safe(unit_scheme, FieldSet(g2=0.01), 2)
    assert not probe_safe(unit_scheme, FieldSet(g2=0.1), 2)


def test_unit_conversion():
    assert parse_quantity("1 GHz") == pytest.approx(2 * np.pi * 1e9)
    assert to_angular(1.0, "cm^-1") == pytest.approx(2 * np.pi * 2.99792458e10)
    assert from_angular(to_angular(3.0, "MHz"), "MHz") == pytest.approx(3.0)
    assert parse_quantity("5") == 5.0
    with pytest.raises(ConfigError):
        parse_quantity("1 parsec")
