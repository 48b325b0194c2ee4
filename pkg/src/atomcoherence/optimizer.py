"""Search for inversionless-gain operating points.

A coarse grid over the decision variables is followed by Nelder-Mead
refinement from the best grid points and from seeded random starts. The
probe transition must not be inverted at the reported point.
"""

from __future__ import annotations

import dataclasses
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from . import sodium
from .errors import Infeasible, ValidationError
from .scheme import FieldSet, LevelScheme, Populations
from .spectra import default_grid, vscheme_form_factor
from .steady_state import saturated_populations

OBJECTIVES = ("gain_center", "max_gain", "gain_bandwidth")
SCHEME_VARIABLES = ("g3_sq", "omega3", "pump_l", "pump_g", "pump_n", "pump_m")
MODEL_VARIABLES = ("kappa", "g3_sq", "omega3")


@dataclass(frozen=True)
class Variable:
    """Decision variable with finite bounds; ``log`` samples geometrically."""

    name: str
    lo: float
    hi: float
    log: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi < self.lo:
            raise ValidationError(f"{self.name}: bounds must be finite with lo <= hi")
        if self.log and self.lo <= 0:
            raise ValidationError(f"{self.name}: log scaling needs lo > 0")

    @property
    def fixed(self) -> bool:
        return self.hi == self.lo

    def to_unit(self, value: float) -> float:
        if self.fixed:
            return 0.0
        if self.log:
            return np.log(value / self.lo) / np.log(self.hi / self.lo)
        return (value - self.lo) / (self.hi - self.lo)

    def from_unit(self, u: float) -> float:
        u = min(max(u, 0.0), 1.0)
        if self.fixed:
            return self.lo
        if self.log:
            return float(self.lo * (self.hi / self.lo) ** u)
        return float(self.lo + u * (self.hi - self.lo))


@dataclass(frozen=True)
class OptimizationProblem:
    """Objective, decision variables and search settings.

    Parameters
    ----------
    objective : str
        ``"gain_center"`` (gain at ``Ω_2 = 0``), ``"max_gain"`` (largest gain
        over the ``Ω_2`` grid) or ``"gain_bandwidth"`` (largest gain times
        the width of the gain band).
    variables : tuple of Variable
        For a :class:`LevelScheme`: ``g3_sq``, ``omega3`` and pump rates.
        For a sodium :class:`~atomcoherence.sodium.CollisionModel`:
        ``kappa``, ``g3_sq`` (alternatives) and ``omega3``.
    tolerance : float
        Allowed inversion ``r_upper - r_lower`` on the probe transition.
    """

    objective: str = "gain_center"
    variables: Tuple[Variable, ...] = ()
    tolerance: float = 0.0
    grid_points: int = 32
    restarts: int = 4
    seed: int = 0
    probe_points: int = 801

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"objective must be one of {OBJECTIVES}")
        if not self.variables:
            raise ValidationError("at least one decision variable is required")
        if self.tolerance < 0:
            raise ValidationError("constraint tolerance must be >= 0")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate decision variable")
        if "kappa" in names and "g3_sq" in names:
            raise ValidationError("kappa and g3_sq are alternatives")


@dataclass(frozen=True)
class OptimumReport:
    """Best point, its objective, and the no-inversion certificate."""

    point: Dict[str, float]
    value: float
    feasible: bool
    residual: float
    populations: Populations
    evaluations: int
    seed: int
    history: Tuple[float, ...] = field(default=(), repr=False)


def _state(problem: OptimizationProblem, target, values: Dict[str, float]):
    """Scheme, |G_3|², Ω_3 and populations at one decision point."""
    omega3 = values.get("omega3", 0.0)
    if isinstance(target, sodium.CollisionModel):
        scheme = sodium.vscheme(target)
        if "kappa" in values:
            g3 = sodium.g3_for_kappa(target, values["kappa"], omega3)
        else:
            g3 = np.sqrt(values.get("g3_sq", 0.0))
        pops = sodium.level_populations(target, g3, omega3)
    else:
        pumps = {k: v for k, v in values.items() if k.startswith("pump_")}
        scheme = dataclasses.replace(target, **pumps) if pumps else target
        g3 = np.sqrt(values.get("g3_sq", 0.0))
        pops = saturated_populations(scheme, FieldSet(g3=g3, omega3=omega3))
    return scheme, g3, omega3, pops


def _gain(problem: OptimizationProblem, scheme, g3, omega3, pops) -> float:
    if problem.objective == "gain_center":
        return float(-vscheme_form_factor(scheme, g3, omega3, [0.0], pops).imag[0])
    scale = max(scheme.width_ng, abs(g3), abs(omega3))
    grid = default_grid(scale, problem.probe_points)
    gain = -vscheme_form_factor(scheme, g3, omega3, grid, pops).imag
    best = float(np.max(gain))
    if problem.objective == "max_gain" or best <= 0:
        return best
    band = grid[gain >= 0.5 * best]
    return best * float(band[-1] - band[0] + (grid[1] - grid[0]))


def _check_target(problem: OptimizationProblem, target) -> None:
    allowed = MODEL_VARIABLES if isinstance(target, sodium.CollisionModel) else SCHEME_VARIABLES
    if not isinstance(target, (LevelScheme, sodium.CollisionModel)):
        raise ValidationError("optimize needs a LevelScheme or a CollisionModel")
    for v in problem.variables:
        if v.name not in allowed:
            raise ValidationError(f"{v.name}: not a decision variable for {type(target).__name__}")


def optimize(problem: OptimizationProblem,
             target: Union[LevelScheme, "sodium.CollisionModel"],
             threads: int = 1) -> OptimumReport:
    """Maximize the gain objective subject to no probe inversion.

    Raises
    ------
    Infeasible
        If no sampled or refined point satisfies the constraint.
    """
    _check_target(problem, target)
    variables = problem.variables
    free = [i for i, v in enumerate(variables) if not v.fixed]

    def decode(u) -> Dict[str, float]:
        full = np.zeros(len(variables))
        full[free] = u
        return {v.name: v.from_unit(x) for v, x in zip(variables, full)}

    def evaluate(u):
        values = decode(u)
        scheme, g3, omega3, pops = _state(problem, target, values)
        residual = pops.r_n - pops.r_g + problem.tolerance
        gain = _gain(problem, scheme, g3, omega3, pops)
        return gain, residual, pops

    count = 0

    def penalized(u) -> float:
        nonlocal count
        count += 1
        gain, residual, _ = evaluate(np.clip(u, 0.0, 1.0))
        if residual < 0:
            return 1e3 * (1.0 - residual / max(abs(target_scale), 1e-300))
        return -gain

    target_scale = target.total if isinstance(target, sodium.CollisionModel) else max(
        target.unperturbed().total, 1e-300)

    axis = np.linspace(0.0, 1.0, problem.grid_points)
    points = [np.array(p) for p in itertools.product(axis, repeat=len(free))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(penalized, points))
    else:
        scores = [penalized(p) for p in points]
    scores = np.asarray(scores)
    order = np.argsort(scores, kind="stable")

    rng = np.random.default_rng(problem.seed)
    starts = [points[i] for i in order[: max(1, problem.restarts)]]
    starts += [rng.random(len(free)) for _ in range(problem.restarts)]

    best_u, best_score = points[order[0]], float(scores[order[0]])
    history = []
    if free:
        step = 1.0 / max(problem.grid_points - 1, 1)
        for x0 in starts:
            simplex = np.vstack([x0] + [np.clip(x0 + step * e, 0, 1) if x0 @ e + step <= 1
                                        else np.clip(x0 - step * e, 0, 1)
                                        for e in np.eye(len(free))])
            res = minimize(penalized, x0, method="Nelder-Mead",
                           options={"initial_simplex": simplex, "xatol": 1e-10,
                                    "fatol": 1e-14, "maxiter": 400 * len(free)})
            u = np.clip(res.x, 0.0, 1.0)
            score = penalized(u)
            history.append(-score)
            if score < best_score:
                best_u, best_score = u, score

    gain, residual, pops = evaluate(best_u)
    if residual < 0:
        raise Infeasible("no point within bounds satisfies the no-inversion constraint")
    return OptimumReport(point=decode(best_u), value=gain, feasible=True, residual=residual,
                         populations=pops, evaluations=count, seed=problem.seed,
                         history=tuple(history))
