import numpy as np
import pytest

from atomcoherence.errors import Infeasible, ValidationError
from atomcoherence.optimizer import OptimizationProblem, Variable, optimize
from atomcoherence.scheme import FieldSet, LevelScheme
from atomcoherence.sodium import CollisionModel, kappa_root
from atomcoherence.spectra import vscheme_form_factor
from atomcoherence.steady_state import saturated_populations

FIELD_VARS = (Variable("g3_sq", 0.01, 100.0, log=True), Variable("omega3", -5.0, 5.0))


@pytest.fixture(scope="module")
def na():
    return CollisionModel(width_gm=7.5e9)


@pytest.fixture(scope="module")
def centre_optimum():
    s = LevelScheme.from_populations(
        n_l=0.1, n_g=0.2, n_n=1.0, n_m=0.3, decay_l=1, decay_g=1, decay_n=1, decay_m=1,
        width_lg=1, width_ng=1, width_nm=1, width_lm=1, width_ln=0.5, width_gm=0.05,
        branch_gn=0.3, branch_mn=0.3)
    return s, optimize(OptimizationProblem(variables=FIELD_VARS), s)


def test_sodium_optimum_near_population_balance(na):
    rep = optimize(OptimizationProblem(variables=(Variable("kappa", 1.0, 1000.0, log=True),)), na)
    assert rep.feasible and rep.residual >= 0
    assert rep.point["kappa"] == pytest.approx(77.0, rel=0.2)
    assert rep.point["kappa"] == pytest.approx(kappa_root(na), rel=1e-6)
    assert rep.value > 0


def test_collapsed_bounds_return_the_point(na):
    rep = optimize(OptimizationProblem(variables=(Variable("kappa", 40.0, 40.0),)), na)
    assert rep.point == {"kappa": 40.0}


def test_random_audit(centre_optimum):
    scheme, rep = centre_optimum
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 100:
        g3 = np.sqrt(10 ** rng.uniform(-2, 2))
        w3 = rng.uniform(-5, 5)
        pops = saturated_populations(scheme, FieldSet(g3=g3, omega3=w3))
        if pops.r_n < pops.r_g:
            continue
        gain = -vscheme_form_factor(scheme, g3, w3, [0.0], pops).imag[0]
        assert gain <= rep.value + 1e-12
        checked += 1


def test_reported_gain_non_negative(centre_optimum):
    _, rep = centre_optimum
    assert rep.value >= 0 and rep.residual >= 0


def test_bit_identical_reruns(centre_optimum):
    scheme, rep = centre_optimum
    again = optimize(OptimizationProblem(variables=FIELD_VARS), scheme)
    assert again.point == rep.point and again.value == rep.value
    assert again.history == rep.history


def test_threads_do_not_change_result(centre_optimum):
    scheme, rep = centre_optimum
    assert optimize(OptimizationProblem(variables=FIELD_VARS), scheme, threads=4).point == rep.point


@pytest.mark.parametrize("objective", ["max_gain", "gain_bandwidth"])
def test_spectral_objectives(centre_optimum, objective):
    scheme, rep = centre_optimum
    prob = OptimizationProblem(objective=objective, variables=FIELD_VARS, grid_points=12,
                               probe_points=201)
    out = optimize(prob, scheme)
    assert out.feasible and out.value > 0
    if objective == "max_gain":
        assert out.value >= rep.value * (1 - 1e-6)


def test_pump_variable(centre_optimum):
    scheme, _ = centre_optimum
    prob = OptimizationProblem(variables=(Variable("g3_sq", 0.25, 0.25),
                                          Variable("pump_n", 0.1, 2.0)), grid_points=8)
    rep = optimize(prob, scheme)
    assert 0.1 <= rep.point["pump_n"] <= 2.0 and rep.residual >= 0


def test_infeasible_when_always_inverted():
    s = LevelScheme.from_populations(n_l=0.1, n_g=0.8, n_n=0.2, n_m=0.0, decay_l=1, decay_g=1,
                                     decay_n=1, decay_m=1, width_lg=1, width_ng=1, width_nm=1,
                                     width_lm=1, width_ln=1, width_gm=1)
    with pytest.raises(Infeasible):
        optimize(OptimizationProblem(variables=(Variable("g3_sq", 0.0, 0.0),)), s)


def test_problem_validation(na):
    with pytest.raises(ValidationError):
        OptimizationProblem(objective="loss", variables=FIELD_VARS)
    with pytest.raises(ValidationError):
        OptimizationProblem(variables=())
    with pytest.raises(ValidationError):
        Variable("g3_sq", 1.0, 0.5)
    with pytest.raises(ValidationError):
        Variable("g3_sq", 0.0, 1.0, log=True)
    with pytest.raises(ValidationError):
        optimize(OptimizationProblem(variables=(Variable("pump_n", 0, 1),)), na)
