import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from atomcoherence.cli import format_csv
from atomcoherence.fwm import MixingConfig, eit_factors
from atomcoherence.lics import fano_term
from atomcoherence.local_field import clausius_mossotti
from atomcoherence.optimizer import Variable
from atomcoherence.relaxation import DoubletConfig, resonance_contrast
from atomcoherence.scheme import FieldSet, LevelScheme, build_denominators
from atomcoherence.sodium import CollisionModel, level_populations
from atomcoherence.spectra import vscheme_form_factor
from atomcoherence.steady_state import oracle_solve, solve_closed_form

pos = st.floats(0.05, 5.0)
det = st.floats(-10.0, 10.0)
small = settings(max_examples=60, deadline=None)


@st.composite
def schemes(draw):
    d = {f"decay_{x}": draw(pos) for x in "lgnm"}
    extra = draw(st.floats(0.0, 2.0))
    pumps = {f"pump_{x}": draw(st.floats(0.0, 1.0)) for x in "lgnm"}
    if not any(pumps.values()):
        pumps["pump_n"] = 1.0
    branches = {"branch_gl": draw(st.floats(0, 0.5)) * d["decay_g"],
                "branch_gn": draw(st.floats(0, 0.5)) * d["decay_g"],
                "branch_ml": draw(st.floats(0, 0.5)) * d["decay_m"],
                "branch_mn": draw(st.floats(0, 0.5)) * d["decay_m"]}
    return LevelScheme.spontaneous(**d, extra_width=extra, **pumps, **branches)


@small
@given(schemes(), st.floats(0.0, 3.0), det, det, det)
def test_closed_form_matches_oracle(scheme, g3, w2, w3, w4):
    f = FieldSet(g1=0.0, g2=1e-5, g3=g3, g4=1e-5, omega2=w2, omega3=w3, omega4=w4)
    a = solve_closed_form(scheme, f).as_dict()
    b = oracle_solve(scheme, f).as_dict()
    for k in a:
        scale = max(abs(b[k]), 1e-300)
        assert abs(a[k] - b[k]) <= 1e-9 * scale + 1e-20


@small
@given(schemes(), st.floats(0.0, 4.0), det, st.lists(det, min_size=1, max_size=5))
def test_form_factor_mirror_symmetry(scheme, g3, w3, grid):
    assume(abs(scheme.n_n - scheme.n_g) > 1e-9)
    grid = np.unique(grid)
    a = vscheme_form_factor(scheme, g3, w3, grid).values
    b = vscheme_form_factor(scheme, g3, -w3, -grid[::-1]).values[::-1]
    # Im f is even and Re f odd under the mirror.
    assert np.allclose(b, -np.conj(a), rtol=1e-10, atol=1e-14)


@small
@given(schemes(), st.floats(-5, 5), st.floats(-5, 5))
def test_denominators_have_positive_real_part(scheme, w1, w3):
    d = build_denominators(scheme, FieldSet(omega1=w1, omega3=w3))
    for name in ("p1", "p2", "p3", "p4", "p12", "p43", "p32", "p41", "d2", "d4"):
        assert np.real(getattr(d, name)) > 0


@small
@given(st.floats(0, 50), st.floats(0, 50), det, det, det)
def test_mixing_identity(g2, g3, x1, x02, xs):
    cfg = MixingConfig(g2=g2, g3=g3, x1=x1, x02=x02, xs=xs)
    f1, fs, f = eit_factors(cfg)
    p1, p2, p3, d1, d2, d3 = cfg.denominators()
    assert abs(f - f1 / (1 + g3 / (d3 * p2))) <= 1e-12 * max(abs(f), 1e-300)


@small
@given(st.floats(-100, 100), st.floats(-20, 20))
def test_fano_term_bounds(y, q):
    v = fano_term(y, q)
    assert 0 <= v <= (1 + q * q) * (1 + 1e-12)


@small
@given(st.complex_numbers(max_magnitude=1e-28), st.floats(0, 1e27))
def test_clausius_mossotti_identity(alpha, n):
    try:
        eps, lf = clausius_mossotti(alpha, n)
    except ArithmeticError:
        return
    assert abs((eps + 2) / 3 - lf) <= 1e-9 * abs(lf)


@small
@given(pos, pos, pos, st.floats(1e-3, 1e3))
def test_contrast_scale_invariance(a, b, c, s):
    x = resonance_contrast(DoubletConfig(0.0, 0.0, 0.0, a, b, c))
    y = resonance_contrast(DoubletConfig(0.0, 0.0, 0.0, s * a, s * b, s * c))
    assert abs(x - y) <= 1e-12 * max(x, 1.0)


@small
@given(st.floats(1e6, 1e12), st.floats(-1e11, 1e11), st.floats(200, 1500))
def test_sodium_populations_physical(g3, w3, temperature):
    m = CollisionModel(temperature=temperature)
    p = level_populations(m, g3, w3)
    assert min(p.r_n, p.r_g, p.r_m) >= -1e-12
    assert abs(p.r_n + p.r_g + p.r_m - m.total) < 1e-12


@small
@given(st.floats(1e-3, 1.0), st.floats(1.001, 1e3), st.floats(0, 1), st.booleans())
def test_variable_unit_round_trip(lo, ratio, u, log):
    v = Variable("g3_sq", lo, lo * ratio, log=log)
    assert abs(v.to_unit(v.from_unit(u)) - u) < 1e-9


@small
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_values_round_trip(values):
    text = format_csv({"detuning": np.array(values)})
    back = [float(line) for line in text.splitlines()[1:]]
    assert back == [float(v) for v in values]
