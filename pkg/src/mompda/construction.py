"""Initial solution builders.

``heuristic_solution`` runs an event-triggered constructive simulation in
which every robot that becomes free ranks the unfinished tasks by a blend
of two ranks: how soon it could arrive there and how soon the task would
then be finished. Sweeping the blend weight and the direction of the
completion-time ranking gives 22 candidate plans; the best one is kept.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Instance, TravelTimeMatrix, build_travel_times
from .simulator import Evaluation, SolutionMatrix, complete_time, simulate_rows

ASCENDING, DESCENDING = 1, 0


@dataclass(frozen=True)
class HeuristicConfig:
    weights: tuple[float, ...] = tuple(round(0.1 * i, 10) for i in range(11))
    rb_modes: tuple[int, ...] = (DESCENDING, ASCENDING)

    def __post_init__(self) -> None:
        if list(self.weights) != sorted(self.weights):
            raise ValueError("weights must be sorted ascending")
        if any(not 0.0 <= w <= 1.0 for w in self.weights):
            raise ValueError("weights must lie in [0, 1]")


@dataclass
class PredictionState:
    """Forecast of a partially built plan.

    A robot is committed to a task as soon as it chooses it, so ``visits``
    also holds robots that are still travelling.
    """

    instance: Instance
    travel: TravelTimeMatrix
    n_robots: int
    visits: list[list[tuple[float, int]]] = field(init=False)
    completion: list[float] = field(init=False)
    available: list[float] = field(init=False)
    location: list[int] = field(init=False)

    def __post_init__(self) -> None:
        n = self.instance.n_tasks
        self.visits = [[] for _ in range(n + 1)]
        self.completion = [math.inf] * (n + 1)
        self.available = [0.0] * self.n_robots
        self.location = [0] * self.n_robots

    def arrivals(self, task: int) -> list[float]:
        return [a for a, _ in self.visits[task]]

    def demand_at(self, task: int, t: float) -> float:
        """Extrapolated demand of ``task`` at time ``t``."""
        inst = self.instance
        if t >= self.completion[task]:
            return 0.0
        q = inst.initial_demands[task - 1] + inst.increment_rates[task - 1] * t
        q -= inst.robot_ability * sum(t - a for a, _ in self.visits[task] if a < t)
        return q

    def net_rate(self, task: int, t: float) -> float:
        """Committed net demand rate of ``task`` just after ``t``."""
        present = sum(1 for a, _ in self.visits[task] if a <= t)
        return self.instance.increment_rates[task - 1] - self.instance.robot_ability * present

    def commit(self, robot: int, task: int, arrival: float) -> None:
        bisect.insort(self.visits[task], (arrival, robot))
        inst = self.instance
        done = complete_time(inst.initial_demands[task - 1], inst.increment_rates[task - 1],
                             inst.robot_ability, self.arrivals(task))
        self.completion[task] = math.inf if done is None else done
        self.location[robot] = task
        for a, w in self.visits[task]:
            self.available[w] = max(a, self.completion[task])


def predict_times(state: PredictionState, robot: int, task: int) -> tuple[float, float]:
    """Forecast arrival and completion if ``robot`` heads to ``task`` next.

    The completion time is ``inf`` when the committed robots plus this one
    still cannot outpace the task's demand growth.
    """
    at = state.available[robot] + state.travel.rows[state.location[robot]][task]
    inst = state.instance
    arr = sorted([*state.arrivals(task), at])
    ct = complete_time(inst.initial_demands[task - 1], inst.increment_rates[task - 1],
                       inst.robot_ability, arr)
    return at, (math.inf if ct is None else ct)


def random_solution(instance: Instance, m: int, rng: np.random.Generator) -> SolutionMatrix:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    n = instance.n_tasks
    return tuple(tuple(int(v) + 1 for v in rng.permutation(n)) for _ in range(m))


def _ranks(values: dict[int, float], reverse: bool) -> dict[int, int]:
    # 1-based ranks, ties broken by task index
    key = (lambda j: (-values[j], j)) if reverse else (lambda j: (values[j], j))
    return {j: r for r, j in enumerate(sorted(values, key=key), start=1)}


def construct(instance: Instance, travel: TravelTimeMatrix, m: int, weight: float, rb: int
              ) -> tuple[tuple[int, ...], ...]:
    """One constructive build; rows hold only the tasks each robot chose."""
    n = instance.n_tasks
    state = PredictionState(instance, travel, m)
    rows: list[list[int]] = [[] for _ in range(m)]
    idle = [False] * m
    while True:
        pending = [state.available[k] for k in range(m) if not idle[k] and state.available[k] < math.inf]
        if not pending:
            break
        now = min(pending)
        open_tasks = [j for j in range(1, n + 1) if state.completion[j] > now]
        if not open_tasks:
            break
        active = [k for k in range(m) if not idle[k] and state.available[k] == now]
        for k in active:
            at_map: dict[int, float] = {}
            ct_map: dict[int, float] = {}
            for j in open_tasks:
                at, ct = predict_times(state, k, j)
                # arriving after the task is finished contributes nothing
                if at < state.completion[j]:
                    at_map[j], ct_map[j] = at, ct
            if not at_map:
                idle[k] = True
                continue
            r_at = _ranks(at_map, reverse=False)
            r_ct = _ranks(ct_map, reverse=(rb == DESCENDING))
            best = min(at_map, key=lambda j: (weight * r_at[j] + (1 - weight) * r_ct[j], j))
            rows[k].append(best)
            state.commit(k, best, at_map[best])
    return tuple(tuple(r) for r in rows)


@functools.lru_cache(maxsize=8192)
def _cached_construct(instance: Instance, m: int, weight: float, rb: int) -> tuple[tuple[int, ...], ...]:
    return construct(instance, build_travel_times(instance), m, weight, rb)


def complement(rows: Sequence[Sequence[int]], n_tasks: int, rng: np.random.Generator) -> SolutionMatrix:
    """Append each row's unvisited tasks in shuffled order."""
    full = []
    for row in rows:
        seen = set(row)
        rest = [j for j in range(1, n_tasks + 1) if j not in seen]
        full.append(tuple(row) + tuple(rest[i] for i in rng.permutation(len(rest))))
    return tuple(full)


@dataclass(frozen=True)
class HeuristicResult:
    solution: SolutionMatrix
    evaluation: Evaluation
    all_infeasible: bool
    n_evaluations: int


def heuristic_solution(
    instance: Instance,
    m: int,
    rng: np.random.Generator | None = None,
    travel: TravelTimeMatrix | None = None,
    config: HeuristicConfig = HeuristicConfig(),
    evaluate: Callable[[SolutionMatrix], Evaluation] | None = None,
) -> HeuristicResult:
    """Best of ``2 * len(config.weights)`` constructive builds, complemented.

    Every candidate is complemented to full permutation rows and decoded;
    the one with the smallest (penalised) makespan wins, first found on ties.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(0) if rng is None else rng
    # builds depend only on the instance, so they are memoised unless a custom
    # travel matrix is supplied
    travel_given = travel is not None
    travel = build_travel_times(instance) if travel is None else travel
    if evaluate is None:
        def evaluate(sol: SolutionMatrix) -> Evaluation:
            return simulate_rows(instance, travel, sol)

    best: tuple[SolutionMatrix, Evaluation] | None = None
    count = 0
    for rb in config.rb_modes:
        for w in config.weights:
            if travel_given:
                rows = construct(instance, travel, m, w, rb)
            else:
                rows = _cached_construct(instance, m, w, rb)
            sol = complement(rows, instance.n_tasks, rng)
            ev = evaluate(sol)
            count += 1
            if best is None or ev.penalty_makespan < best[1].penalty_makespan:
                best = (sol, ev)
    assert best is not None
    return HeuristicResult(best[0], best[1], not best[1].feasible, count)


def hybrid_init(
    instance: Instance,
    budgets: Sequence[int],
    rng: np.random.Generator,
    heuristic: Callable[[int], SolutionMatrix] | None = None,
) -> list[tuple[str, SolutionMatrix]]:
    """Heuristic build for the first occurrence of each robot count, random otherwise.

    Returns ``(origin, solution)`` pairs where origin is ``"heuristic"`` or
    ``"random"``.
    """
    if heuristic is None:
        def heuristic(m: int) -> SolutionMatrix:
            return heuristic_solution(instance, m, rng).solution

    seen: set[int] = set()
    out = []
    for m in budgets:
        if m in seen:
            out.append(("random", random_solution(instance, m, rng)))
        else:
            seen.add(m)
            out.append(("heuristic", heuristic(m)))
    return out
