"""Hybrid decomposition-based MOEA with epsilon-constraint subproblems.

Makespan is the main objective; the robot count is turned into a bound.
Subproblem ``l`` of ``R`` carries ``eps_l = (l - 1) / (R - 1)`` and may use
at most ``floor(eps_l * (UBM - LBM) + LBM)`` robots. Subproblems evolve
together: parents come from a neighbourhood in epsilon space, a dynamic
resource allocation (DRA) step picks which subproblems reproduce, every
child is routed to the subproblem it serves best and then competes with
that subproblem's neighbours under the feasibility rule.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .archive import ParetoArchive
from .construction import heuristic_solution, hybrid_init
from .core import Instance, RobotBounds, build_travel_times, robot_bounds
from .operators import reproduce, swap_mutation
from .simulator import Evaluation, SolutionMatrix, simulate_rows

log = logging.getLogger(__name__)

DRA_THRESHOLD = 0.001


@dataclass(frozen=True)
class EngineConfig:
    pop_size: int = 100
    neighborhood_size: int | None = None
    mating_probability: float = 0.9
    dra_interval: int = 50
    selected_size: int | None = None
    nfe_budget: int = 50000
    crossover_probability: float = 0.9
    repair_attempts: int = 10
    max_subset_children: int = 10

    def __post_init__(self) -> None:
        if self.pop_size < 2:
            raise ValueError(f"pop_size must be >= 2, got {self.pop_size}")
        if self.nfe_budget < 0:
            raise ValueError("nfe_budget must be non-negative")
        if self.dra_interval < 1:
            raise ValueError("dra_interval must be >= 1")
        for name in ("mating_probability", "crossover_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.neighborhood_size is not None and not 1 <= self.neighborhood_size <= self.pop_size:
            raise ValueError("neighborhood_size must lie in 1..pop_size")
        if self.selected_size is not None and not 1 <= self.selected_size <= self.pop_size:
            raise ValueError("selected_size must lie in 1..pop_size")

    @property
    def T(self) -> int:
        """Neighbourhood size, ``floor(0.1 R)`` but at least two."""
        if self.neighborhood_size is not None:
            return self.neighborhood_size
        return min(self.pop_size, max(2, self.pop_size // 10))

    @property
    def n_selected(self) -> int:
        """Subproblems evolved per generation, ``floor(R / 5) - 2`` but at least two."""
        if self.selected_size is not None:
            return self.selected_size
        return min(self.pop_size, max(2, self.pop_size // 5 - 2))


@dataclass
class Subproblem:
    index: int
    epsilon: float
    robot_budget: int
    solution: SolutionMatrix
    evaluation: Evaluation
    neighborhood: list[int] = field(default_factory=list)
    utility: float = 1.0
    last_fitness: float = math.inf


class Evaluator:
    """Counts decodes; every algorithm spends its budget through one of these."""

    def __init__(self, instance: Instance) -> None:
        self.instance = instance
        self.travel = build_travel_times(instance)
        self.count = 0

    def __call__(self, solution: SolutionMatrix) -> Evaluation:
        self.count += 1
        return simulate_rows(self.instance, self.travel, solution)


@dataclass
class RunResult:
    archive: ParetoArchive
    evaluations: int
    log: list[dict] = field(default_factory=list)
    bounds: RobotBounds | None = None
    population: list[Subproblem] = field(default_factory=list)


def epsilon_grid(R: int) -> list[float]:
    if R < 2:
        raise ValueError(f"R must be >= 2, got {R}")
    return [(l - 1) / (R - 1) for l in range(1, R + 1)]


def robot_budgets(R: int, bounds: RobotBounds) -> list[int]:
    """``floor(eps_l * (UBM - LBM) + LBM)`` for each grid point, in exact arithmetic."""
    span = bounds.ubm - bounds.lbm
    return [(l * span) // (R - 1) + bounds.lbm for l in range(R)]


def build_neighborhoods(grid: Sequence[float], T: int) -> list[list[int]]:
    """Indexes of the ``T`` closest epsilon values (self included), ties by index."""
    if not 1 <= T <= len(grid):
        raise ValueError(f"T must lie in 1..{len(grid)}, got {T}")
    return [sorted(range(len(grid)), key=lambda j: (abs(e - grid[j]), j))[:T] for e in grid]


def normalized_robots(m: int, bounds: RobotBounds) -> float:
    span = bounds.ubm - bounds.lbm
    return 0.0 if span == 0 else (m - bounds.lbm) / span


def violation(evaluation: Evaluation, budget: int) -> int:
    return max(0, evaluation.robot_count - budget)


def fitness(sp: Subproblem) -> float:
    """Scalar used for utility tracking: budget violation first, then makespan."""
    return violation(sp.evaluation, sp.robot_budget) * 1e12 + sp.evaluation.penalty_makespan


def update_utility(utility: float, improvement: float) -> float:
    if improvement > DRA_THRESHOLD:
        return 1.0
    return (0.95 + 0.05 * improvement / DRA_THRESHOLD) * utility


def dra_update_and_select(
    subproblems: Sequence[Subproblem],
    generation: int,
    config: EngineConfig,
    rng: np.random.Generator,
) -> list[int]:
    """Refresh utilities (after the first interval) and pick the subproblems to evolve.

    Both boundary subproblems are always selected; the rest are tournament
    winners (10 candidates, highest utility) among the unselected ones.
    """
    if generation > 0:
        for sp in subproblems:
            new = fitness(sp)
            old = sp.last_fitness
            delta = (old - new) / old if 0 < old < math.inf else 0.0
            sp.utility = update_utility(sp.utility, delta)
    for sp in subproblems:
        sp.last_fitness = fitness(sp)

    return select_by_utility([sp.utility for sp in subproblems], config.n_selected, rng)


def select_by_utility(utilities: Sequence[float], n_selected: int, rng: np.random.Generator,
                      tournament: int = 10) -> list[int]:
    """Both boundary indexes, then tournament winners by utility until ``n_selected``."""
    R = len(utilities)
    chosen = [0, R - 1] if R > 1 else [0]
    target = max(len(chosen), min(n_selected, R))
    pool = [i for i in range(R) if i not in chosen]
    while len(chosen) < target:
        size = min(tournament, len(pool))
        cands = [pool[int(c)] for c in rng.choice(len(pool), size=size, replace=False)]
        best = max(cands, key=lambda i: (utilities[i], -i))
        chosen.append(best)
        pool.remove(best)
    return chosen


def match_subproblem(y: Evaluation, subproblems: Sequence[Subproblem], bounds: RobotBounds) -> int:
    """Subproblem a new solution should compete for.

    Among subproblems whose bound ``y`` satisfies, the one whose incumbent
    has the largest makespan; if ``y`` satisfies none, the least violated.
    """
    ny = normalized_robots(y.robot_count, bounds)
    best_sat, best_sat_f1 = None, -math.inf
    best_cv, best_cv_idx = -math.inf, 0
    for i, sp in enumerate(subproblems):
        cv = min(sp.epsilon - ny, 0.0)
        if cv == 0.0:
            f1 = sp.evaluation.penalty_makespan
            if f1 > best_sat_f1:
                best_sat, best_sat_f1 = i, f1
        elif cv > best_cv:
            best_cv, best_cv_idx = cv, i
    return best_sat if best_sat is not None else best_cv_idx


def better(y: Evaluation, incumbent: Evaluation, budget: int) -> bool:
    """Feasibility rule: smaller budget violation, then smaller (penalised) makespan."""
    vy, vi = violation(y, budget), violation(incumbent, budget)
    if vy != vi:
        return vy < vi
    return y.penalty_makespan < incumbent.penalty_makespan


def replace_if_better(y: SolutionMatrix, y_eval: Evaluation, k: int,
                      subproblems: Sequence[Subproblem]) -> list[int]:
    """Let ``y`` replace every incumbent in the neighbourhood of ``k`` it beats."""
    replaced = []
    for j in subproblems[k].neighborhood:
        sp = subproblems[j]
        if better(y_eval, sp.evaluation, sp.robot_budget):
            sp.solution, sp.evaluation = y, y_eval
            replaced.append(j)
    return replaced


def _best_by_budget(subproblems: Sequence[Subproblem]) -> str:
    best: dict[int, float] = {}
    for sp in subproblems:
        ev = sp.evaluation
        if ev.feasible and ev.robot_count <= sp.robot_budget:
            b = sp.robot_budget
            best[b] = min(best.get(b, math.inf), ev.makespan)
    return ";".join(f"{b}:{best[b]!r}" for b in sorted(best))


def repair(child: SolutionMatrix, ev: Evaluation, evaluate: Evaluator, rng: np.random.Generator,
           attempts: int, budget: int) -> tuple[SolutionMatrix, Evaluation]:
    """Random swap walk from an infeasible child; first feasible point wins."""
    cand = child
    for _ in range(attempts):
        if evaluate.count >= budget:
            break
        cand = swap_mutation(cand, rng)
        cev = evaluate(cand)
        if cev.feasible:
            return cand, cev
    return child, ev


def run_hdmoea(instance: Instance, config: EngineConfig = EngineConfig(), seed: int = 0) -> RunResult:
    rng = np.random.default_rng(seed)
    evaluate = Evaluator(instance)
    bounds = robot_bounds(instance)
    R = config.pop_size
    grid = epsilon_grid(R)
    budgets = robot_budgets(R, bounds)

    # heuristic builds are decoded while choosing among candidates; keep the
    # winner's evaluation instead of decoding it again
    heuristic_evals: dict[int, Evaluation] = {}

    def heuristic(m: int) -> SolutionMatrix:
        res = heuristic_solution(instance, m, rng, evaluate=evaluate)
        heuristic_evals[m] = res.evaluation
        return res.solution

    archive = ParetoArchive()
    neighborhoods = build_neighborhoods(grid, config.T)
    subproblems: list[Subproblem] = []
    for i, (origin, sol) in enumerate(hybrid_init(instance, budgets, rng, heuristic)):
        ev = heuristic_evals[budgets[i]] if origin == "heuristic" else evaluate(sol)
        subproblems.append(Subproblem(i, grid[i], budgets[i], sol, ev, neighborhoods[i]))
        archive.update(sol, ev)

    result = RunResult(archive, 0, [], bounds, subproblems)
    gen = 0
    selected: list[int] = []
    everyone = list(range(R))
    while evaluate.count < config.nfe_budget:
        if gen % config.dra_interval == 0:
            selected = dra_update_and_select(subproblems, gen, config, rng)
        for i in selected:
            pool = subproblems[i].neighborhood if rng.random() < config.mating_probability else everyone
            if len(pool) >= 2:
                a, b = (int(v) for v in rng.choice(pool, size=2, replace=False))
            else:
                a = b = pool[0]
            pa, pb = subproblems[a], subproblems[b]
            children = reproduce(pa.solution, pa.evaluation, pb.solution, pb.evaluation, rng,
                                 config.crossover_probability, config.max_subset_children)
            for y in children:
                if evaluate.count >= config.nfe_budget:
                    break
                ev = evaluate(y)
                if not ev.feasible:
                    y, ev = repair(y, ev, evaluate, rng, config.repair_attempts, config.nfe_budget)
                k = match_subproblem(ev, subproblems, bounds)
                replace_if_better(y, ev, k, subproblems)
                archive.update(y, ev)
            if evaluate.count >= config.nfe_budget:
                break
        gen += 1
        result.log.append({
            "generation": gen,
            "evaluations": evaluate.count,
            "archive_size": len(archive),
            "best_by_budget": _best_by_budget(subproblems),
        })
    result.evaluations = evaluate.count
    log.debug("hdmoea finished: %d evaluations, %d generations, |EP|=%d",
              evaluate.count, gen, len(archive))
    return result
