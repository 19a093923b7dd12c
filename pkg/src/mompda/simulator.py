"""Event-triggered decoding of permutation matrices.

A solution holds one row per robot; each row is a permutation of the task
indexes ``1..N`` giving the order in which that robot intends to visit
tasks. Decoding simulates the team from ``t = 0``:

* an active robot walks its row, skipping tasks that are completed or that
  will be completed (by robots already working there) before it could
  arrive, then travels to the first remaining task;
* on arrival it joins the task and stays until the task's demand reaches
  zero; a robot that arrives after the task finished simply becomes active
  again;
* the completion time of a task is re-forecast every time a robot joins.

Skipped or uselessly visited row entries are *invalid elements*.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import Instance, ObjectiveVector, TravelTimeMatrix

SolutionMatrix = tuple[tuple[int, ...], ...]

PENALTY_BASE = 1e9
PENALTY_PER_TASK = 1e6

_ARRIVE, _COMPLETE = 0, 1


class InvalidSolutionError(ValueError):
    """A solution row is not a permutation of the task indexes."""


@dataclass(frozen=True)
class Evaluation:
    objectives: ObjectiveVector
    completion_times: tuple[float, ...]
    arrival_events: tuple[tuple[tuple[int, float], ...], ...]
    invalid_counts: tuple[int, ...]
    feasible: bool
    penalty_makespan: float
    trajectory: tuple[tuple[int, str, int, float], ...] = ()

    @property
    def makespan(self) -> float:
        return self.objectives.makespan

    @property
    def robot_count(self) -> int:
        return self.objectives.robot_count


def validate_solution(solution: Sequence[Sequence[int]], n_tasks: int) -> SolutionMatrix:
    """Return ``solution`` as a tuple matrix, raising if any row is malformed."""
    if len(solution) < 1:
        raise InvalidSolutionError("a solution needs at least one row")
    expected = set(range(1, n_tasks + 1))
    rows = []
    for k, row in enumerate(solution):
        row = tuple(int(v) for v in row)
        if len(row) != n_tasks or set(row) != expected:
            raise InvalidSolutionError(
                f"row {k} is not a permutation of 1..{n_tasks}: {list(row)}"
            )
        rows.append(row)
    return tuple(rows)


def penalty(unfinished: int) -> float:
    return PENALTY_BASE + PENALTY_PER_TASK * unfinished


def complete_time(q0: float, alpha: float, beta: float, arrivals: Sequence[float]) -> float | None:
    """First time the demand of a task hits zero.

    The demand follows ``q(t) = q0 + alpha*t - beta*sum(max(0, t - a_k))``
    where ``a_k`` are the (sorted) arrival times of the executing robots.
    Returns ``None`` when the demand never reaches zero.
    """
    if not arrivals:
        return None
    q = q0 + alpha * arrivals[0]
    t = arrivals[0]
    if q <= 0.0:
        return t
    n = len(arrivals)
    for i in range(n):
        # direct product, so alpha == k * beta gives exactly zero
        rate = alpha - (i + 1) * beta
        nxt = arrivals[i + 1] if i + 1 < n else math.inf
        if rate < 0.0:
            t_zero = t - q / rate
            if t_zero <= nxt:
                return t_zero
        if nxt == math.inf:
            return None
        q += rate * (nxt - t)
        t = nxt
    return None  # pragma: no cover


def decode(
    instance: Instance,
    travel: TravelTimeMatrix,
    solution: Sequence[Sequence[int]],
    *,
    record_trajectory: bool = False,
) -> Evaluation:
    """Simulate ``solution`` and return its objectives and execution trace."""
    rows = validate_solution(solution, instance.n_tasks)
    return simulate_rows(instance, travel, rows, record_trajectory=record_trajectory)


def simulate_rows(
    instance: Instance,
    travel: TravelTimeMatrix,
    rows: Sequence[Sequence[int]],
    *,
    record_trajectory: bool = False,
) -> Evaluation:
    """Decode without validating ``rows``; rows may be partial visit lists."""
    n = instance.n_tasks
    m = len(rows)
    times = travel.rows
    q0s = instance.initial_demands
    alphas = instance.increment_rates
    beta = instance.robot_ability

    # per task: demand and net rate as of the latest arrival
    level = [0.0] * (n + 1)
    rate = [0.0] * (n + 1)
    last = [0.0] * (n + 1)
    workers: list[list[int]] = [[] for _ in range(n + 1)]
    ct = [math.inf] * (n + 1)
    version = [0] * (n + 1)
    executed = [0] * m
    pointer = [0] * m
    location = [0] * m
    arrival_log: list[list[tuple[int, float]]] = [[] for _ in range(m)]
    traj: list[tuple[int, str, int, float]] = []
    # (time, robot, kind, task, version); a completion event is keyed by the
    # lowest-indexed worker and releases all workers in index order
    heap: list[tuple[float, int, int, int, int]] = []

    def dispatch(k: int, now: float) -> None:
        row = rows[k]
        here = times[location[k]]
        p = pointer[k]
        while p < len(row):
            j = row[p]
            arrive = now + here[j]
            if ct[j] > arrive:
                pointer[k] = p + 1
                if record_trajectory:
                    traj.append((k, "depart", j, now))
                heapq.heappush(heap, (arrive, k, _ARRIVE, j, 0))
                return
            p += 1
        pointer[k] = p

    for k in range(m):
        dispatch(k, 0.0)

    while heap:
        now, k, kind, j, ver = heapq.heappop(heap)
        if kind == _COMPLETE:
            if ver != version[j]:
                continue
            for w in sorted(workers[j]):
                if record_trajectory:
                    traj.append((w, "complete", j, now))
                dispatch(w, now)
            continue
        location[k] = j
        if record_trajectory:
            traj.append((k, "arrive", j, now))
        if ct[j] <= now:
            dispatch(k, now)
            continue
        # same floating point steps as complete_time, carried forward
        if workers[j]:
            level[j] += rate[j] * (now - last[j])
        else:
            level[j] = q0s[j - 1] + alphas[j - 1] * now
            rate[j] = alphas[j - 1]
        last[j] = now
        workers[j].append(k)
        executed[k] += 1
        arrival_log[k].append((j, now))
        if level[j] <= 0.0:
            done = now
        else:
            rate[j] = alphas[j - 1] - beta * len(workers[j])
            done = now - level[j] / rate[j] if rate[j] < 0.0 else None
        ct[j] = math.inf if done is None else done
        version[j] += 1
        if done is not None:
            heapq.heappush(heap, (done, min(workers[j]), _COMPLETE, j, version[j]))

    completion = tuple(ct[1:])
    unfinished = sum(1 for c in completion if c == math.inf)
    feasible = unfinished == 0
    if feasible:
        makespan = max(completion)
        penalized = makespan
    else:
        makespan = math.inf
        penalized = penalty(unfinished)
    return Evaluation(
        objectives=ObjectiveVector(makespan, m),
        completion_times=completion,
        arrival_events=tuple(tuple(log) for log in arrival_log),
        invalid_counts=tuple(n - e for e in executed),
        feasible=feasible,
        penalty_makespan=penalized,
        trajectory=tuple(traj),
    )


def oracle_decode(
    instance: Instance,
    travel: TravelTimeMatrix,
    solution: Sequence[Sequence[int]],
    dt: float,
    horizon: float = 1e6,
) -> Evaluation:
    """Fixed-step reference for :func:`decode`, used for verification only.

    Demands are integrated with explicit steps of size ``dt``; no closed-form
    completion times are used. Arrivals are taken at their exact travel
    time and credited for the fraction of the step spent on site, while
    completions are only detected at step ends. The skip forecast only needs the current
    demand and the current net rate, because every robot counted there has
    already arrived.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    rows = validate_solution(solution, instance.n_tasks)
    n = instance.n_tasks
    m = len(rows)
    times = travel.rows
    alphas = list(instance.increment_rates)
    beta = instance.robot_ability

    demand = list(instance.initial_demands)
    done = [False] * n
    ct = [math.inf] * n
    present = [0] * n
    # robot state: ("travel", task, arrival) / ("work", task) / ("idle",)
    state: list[tuple] = [("idle",)] * m
    pointer = [0] * m
    location = [0] * m
    executed = [0] * m
    arrival_log: list[list[tuple[int, float]]] = [[] for _ in range(m)]

    def forecast(j: int, now: float) -> float:
        net = alphas[j] - beta * present[j]
        if done[j]:
            return -math.inf
        if present[j] == 0 or net >= 0:
            return math.inf
        return now + demand[j] / -net

    def dispatch(k: int, now: float) -> None:
        row = rows[k]
        while pointer[k] < n:
            j = row[pointer[k]]
            pointer[k] += 1
            arrive = now + times[location[k]][j]
            if forecast(j - 1, now) > arrive:
                state[k] = ("travel", j - 1, arrive)
                return
        state[k] = ("idle",)

    step = 0
    t = 0.0
    for k in range(m):
        dispatch(k, t)
    dirty = True
    next_arrival = 0.0
    while True:
        if dirty or t >= next_arrival:
            # resolve everything that happens at the current instant
            changed = True
            while changed:
                changed = False
                for k in range(m):
                    s = state[k]
                    if s[0] == "travel" and s[2] <= t:
                        j, arrived = s[1], s[2]
                        location[k] = j + 1
                        if done[j]:
                            dispatch(k, arrived)
                        else:
                            present[j] += 1
                            executed[k] += 1
                            arrival_log[k].append((j + 1, arrived))
                            state[k] = ("work", j)
                            # credit the part of the last step spent on site
                            demand[j] -= beta * (t - arrived)
                            if demand[j] <= 0.0:
                                done[j] = True
                                ct[j] = t
                                present[j] = 0
                        changed = True
                    elif s[0] == "work" and done[s[1]]:
                        dispatch(k, t)
                        changed = True
            if all(done):
                break
            pending = [s[2] for s in state if s[0] == "travel"]
            next_arrival = min(pending, default=math.inf)
            stalled = all(present[j] == 0 or alphas[j] - beta * present[j] >= 0
                          for j in range(n) if not done[j])
            if not pending and stalled:
                break
            rates = [alphas[j] - beta * present[j] for j in range(n)]
            dirty = False
        if t > horizon:
            break
        step += 1
        t = step * dt
        for j in range(n):
            if not done[j]:
                demand[j] += rates[j] * dt
                if present[j] and demand[j] <= 0.0:
                    done[j] = True
                    ct[j] = t
                    present[j] = 0
                    dirty = True

    unfinished = sum(1 for d in done if not d)
    feasible = unfinished == 0
    makespan = max(ct) if feasible else math.inf
    return Evaluation(
        objectives=ObjectiveVector(makespan, m),
        completion_times=tuple(ct),
        arrival_events=tuple(tuple(log) for log in arrival_log),
        invalid_counts=tuple(n - e for e in executed),
        feasible=feasible,
        penalty_makespan=makespan if feasible else penalty(unfinished),
    )


def write_trajectory_csv(evaluation: Evaluation, path: str | Path) -> None:
    """Dump ``(robot, event_type, task, time)`` rows of a recorded decode."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["robot", "event_type", "task", "time"])
        for robot, kind, task, time in evaluation.trajectory:
            writer.writerow([robot + 1, kind, task, repr(time)])
