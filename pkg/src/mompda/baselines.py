"""Comparison algorithms on the same encoding, decoder and operators.

All of them spend their budget through :class:`~mompda.hdmoea.Evaluator`
and keep the same external archive, so fronts and evaluation counts are
directly comparable with the epsilon-constraint engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .archive import ParetoArchive
from .construction import random_solution
from .core import Instance, RobotBounds, dominates, robot_bounds
from .hdmoea import EngineConfig, Evaluator, RunResult, select_by_utility, update_utility
from .metrics import normalize
from .operators import reproduce
from .simulator import Evaluation, SolutionMatrix


@dataclass(frozen=True)
class BaselineConfig(EngineConfig):
    """Engine defaults plus the MOEA/D-specific knobs."""

    replacement_limit: int = 2
    use_dra: bool = False


def _objectives(ev: Evaluation) -> tuple[float, float]:
    return (ev.penalty_makespan, float(ev.robot_count))


def _random_member(instance: Instance, bounds: RobotBounds, rng: np.random.Generator) -> SolutionMatrix:
    m = int(rng.integers(bounds.lbm, bounds.ubm + 1))
    return random_solution(instance, m, rng)


def _front_summary(archive: ParetoArchive) -> str:
    return ";".join(f"{o.robot_count}:{o.makespan!r}" for o in archive.front())


def _log_row(gen: int, evaluate: Evaluator, archive: ParetoArchive) -> dict:
    return {
        "generation": gen,
        "evaluations": evaluate.count,
        "archive_size": len(archive),
        "best_by_budget": _front_summary(archive),
    }


def nondominated_sort(objectives: Sequence[Sequence[float]]) -> list[list[int]]:
    """Fast non-dominated sorting; returns fronts of indexes, best first."""
    n = len(objectives)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    counts = [0] * n
    for p in range(n):
        for q in range(p + 1, n):
            if dominates(objectives[p], objectives[q]):
                dominated_by[p].append(q)
                counts[q] += 1
            elif dominates(objectives[q], objectives[p]):
                dominated_by[q].append(p)
                counts[p] += 1
    fronts = [[p for p in range(n) if counts[p] == 0]]
    while fronts[-1]:
        nxt = []
        for p in fronts[-1]:
            for q in dominated_by[p]:
                counts[q] -= 1
                if counts[q] == 0:
                    nxt.append(q)
        fronts.append(sorted(nxt))
    return fronts[:-1]


def crowding_distance(objectives: Sequence[Sequence[float]], front: Sequence[int]) -> dict[int, float]:
    """Crowding distance inside one front, each objective scaled by its range there."""
    dist = {i: 0.0 for i in front}
    if len(front) <= 2:
        return {i: math.inf for i in front}
    for k in range(len(objectives[front[0]])):
        order = sorted(front, key=lambda i: (objectives[i][k], i))
        lo, hi = objectives[order[0]][k], objectives[order[-1]][k]
        dist[order[0]] = dist[order[-1]] = math.inf
        if hi == lo:
            continue
        for a, i, b in zip(order, order[1:], order[2:]):
            dist[i] += (objectives[b][k] - objectives[a][k]) / (hi - lo)
    return dist


def _rank_and_crowding(objs: Sequence[Sequence[float]]) -> tuple[list[int], list[float], list[list[int]]]:
    fronts = nondominated_sort(objs)
    rank = [0] * len(objs)
    crowd = [0.0] * len(objs)
    for r, f in enumerate(fronts):
        for i, d in crowding_distance(objs, f).items():
            rank[i], crowd[i] = r, d
    return rank, crowd, fronts


def run_nsga2(instance: Instance, config: BaselineConfig = BaselineConfig(), seed: int = 0) -> RunResult:
    """Generational NSGA-II with robot count as part of the genotype."""
    rng = np.random.default_rng(seed)
    evaluate = Evaluator(instance)
    bounds = robot_bounds(instance)
    archive = ParetoArchive()
    result = RunResult(archive, 0, [], bounds)

    pop: list[tuple[SolutionMatrix, Evaluation]] = []
    for _ in range(config.pop_size):
        if evaluate.count >= config.nfe_budget:
            break
        sol = _random_member(instance, bounds, rng)
        ev = evaluate(sol)
        archive.update(sol, ev)
        pop.append((sol, ev))

    gen = 0
    while evaluate.count < config.nfe_budget and len(pop) >= 2:
        objs = [_objectives(ev) for _, ev in pop]
        rank, crowd, _ = _rank_and_crowding(objs)

        def tournament() -> int:
            a, b = (int(v) for v in rng.choice(len(pop), size=2, replace=False))
            return a if (rank[a], -crowd[a], a) < (rank[b], -crowd[b], b) else b

        offspring: list[tuple[SolutionMatrix, Evaluation]] = []
        while len(offspring) < config.pop_size and evaluate.count < config.nfe_budget:
            pa, pb = pop[tournament()], pop[tournament()]
            for y in reproduce(pa[0], pa[1], pb[0], pb[1], rng,
                               config.crossover_probability, config.max_subset_children):
                if evaluate.count >= config.nfe_budget:
                    break
                ev = evaluate(y)
                archive.update(y, ev)
                offspring.append((y, ev))

        merged = pop + offspring
        objs = [_objectives(ev) for _, ev in merged]
        _, crowd, fronts = _rank_and_crowding(objs)
        survivors: list[int] = []
        for f in fronts:
            if len(survivors) + len(f) <= config.pop_size:
                survivors.extend(f)
            else:
                rest = sorted(f, key=lambda i: (-crowd[i], i))
                survivors.extend(rest[:config.pop_size - len(survivors)])
                break
        pop = [merged[i] for i in survivors]
        gen += 1
        result.log.append(_log_row(gen, evaluate, archive))
    result.evaluations = evaluate.count
    return result


def tchebycheff(point: Sequence[float], weight: Sequence[float], ideal: Sequence[float]) -> float:
    return max(w * abs(p - z) for p, w, z in zip(point, weight, ideal))


def run_moead(instance: Instance, config: BaselineConfig = BaselineConfig(), seed: int = 0) -> RunResult:
    """MOEA/D with Tchebycheff scalarisation of the normalised objectives.

    Weight vector ``i`` is ``(i / (R - 1), 1 - i / (R - 1))`` over
    (makespan, robot count), so subproblem ``R - 1`` looks at makespan only.
    Infeasible solutions are scored with their penalised makespan. Each
    child replaces at most ``replacement_limit`` incumbents of its mating
    pool. With ``use_dra`` only the subproblems picked by utility reproduce.
    """
    rng = np.random.default_rng(seed)
    evaluate = Evaluator(instance)
    bounds = robot_bounds(instance)
    archive = ParetoArchive()
    result = RunResult(archive, 0, [], bounds)
    R = config.pop_size
    weights = [(i / (R - 1), 1 - i / (R - 1)) for i in range(R)]
    neighborhoods = [sorted(range(R), key=lambda j: (abs(weights[i][0] - weights[j][0]), j))[:config.T]
                     for i in range(R)]

    def point(ev: Evaluation) -> tuple[float, float]:
        return tuple(normalize((ev.penalty_makespan, ev.robot_count), bounds))

    pop: list[tuple[SolutionMatrix, Evaluation, tuple[float, float]]] = []
    while len(pop) < R and evaluate.count < config.nfe_budget:
        sol = _random_member(instance, bounds, rng)
        ev = evaluate(sol)
        archive.update(sol, ev)
        pop.append((sol, ev, point(ev)))
    if len(pop) < R:
        result.evaluations = evaluate.count
        return result
    ideal = [min(p[2][k] for p in pop) for k in range(2)]

    def g(i: int, pt: Sequence[float]) -> float:
        return tchebycheff(pt, weights[i], ideal)

    utilities = [1.0] * R
    last_g = [g(i, pop[i][2]) for i in range(R)]
    selected = list(range(R))
    everyone = list(range(R))
    gen = 0
    while evaluate.count < config.nfe_budget:
        if config.use_dra and gen % config.dra_interval == 0:
            if gen > 0:
                for i in range(R):
                    new = g(i, pop[i][2])
                    delta = (last_g[i] - new) / last_g[i] if last_g[i] > 0 else 0.0
                    utilities[i] = update_utility(utilities[i], delta)
                    last_g[i] = new
            selected = select_by_utility(utilities, config.n_selected, rng)
        for i in selected:
            pool = neighborhoods[i] if rng.random() < config.mating_probability else everyone
            a, b = (int(v) for v in rng.choice(pool, size=2, replace=False)) if len(pool) >= 2 else (i, i)
            children = reproduce(pop[a][0], pop[a][1], pop[b][0], pop[b][1], rng,
                                 config.crossover_probability, config.max_subset_children)
            for y in children:
                if evaluate.count >= config.nfe_budget:
                    break
                ev = evaluate(y)
                archive.update(y, ev)
                pt = point(ev)
                ideal = [min(z, v) for z, v in zip(ideal, pt)]
                replaced = 0
                for j in (int(v) for v in rng.permutation(pool)):
                    if replaced >= config.replacement_limit:
                        break
                    if g(j, pt) < g(j, pop[j][2]):
                        pop[j] = (y, ev, pt)
                        replaced += 1
            if evaluate.count >= config.nfe_budget:
                break
        gen += 1
        result.log.append(_log_row(gen, evaluate, archive))
    result.evaluations = evaluate.count
    return result


def run_random_search(instance: Instance, config: BaselineConfig = BaselineConfig(), seed: int = 0) -> RunResult:
    """Uniform robot count, uniform permutations, ``nfe_budget`` times."""
    rng = np.random.default_rng(seed)
    evaluate = Evaluator(instance)
    bounds = robot_bounds(instance)
    archive = ParetoArchive()
    result = RunResult(archive, 0, [], bounds)
    while evaluate.count < config.nfe_budget:
        sol = _random_member(instance, bounds, rng)
        archive.update(sol, evaluate(sol))
    result.evaluations = evaluate.count
    result.log.append(_log_row(0, evaluate, archive))
    return result
