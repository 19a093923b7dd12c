"""Domain model of the bi-objective MPDA problem.

An instance is a depot plus ``N`` tasks whose demand grows linearly over
time. Homogeneous robots leave the depot, travel to tasks and reduce their
demand at a shared rate ``beta``. The two minimisation objectives are the
makespan (completion time of the last task) and the number of robots used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

Point = tuple[float, float]


@dataclass(frozen=True)
class Instance:
    """Immutable problem instance.

    Attributes
    ----------
    name : str
        Human readable identifier, e.g. ``"10_C_R_4.29"``.
    depot_position : tuple of float
        Depot coordinates in the unit square.
    task_positions : tuple of points
        One coordinate pair per task; task ``j`` (1-based) is entry ``j - 1``.
    initial_demands : tuple of float
        Demand of each task at ``t = 0``.
    increment_rates : tuple of float
        Inherent demand growth rate of each task.
    robot_ability : float
        Demand removed per time unit by one robot.
    robot_speed : float
        Distance covered per time unit.
    seed : int or None
        Generator seed, if the instance was generated.
    """

    name: str
    depot_position: Point
    task_positions: tuple[Point, ...]
    initial_demands: tuple[float, ...]
    increment_rates: tuple[float, ...]
    robot_ability: float
    robot_speed: float = 1.0
    seed: int | None = None
    allow_zero_rates: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.task_positions)
        if n < 1:
            raise ValueError("an instance needs at least one task")
        if len(self.initial_demands) != n or len(self.increment_rates) != n:
            raise ValueError(
                f"expected {n} demands and rates, got {len(self.initial_demands)} "
                f"and {len(self.increment_rates)}"
            )
        if not self.robot_ability > 0:
            raise ValueError(f"robot_ability must be positive, got {self.robot_ability}")
        if not self.robot_speed > 0:
            raise ValueError(f"robot_speed must be positive, got {self.robot_speed}")
        for j, q0 in enumerate(self.initial_demands, start=1):
            if q0 < 0:
                raise ValueError(f"task {j}: negative initial demand {q0}")
        for j, alpha in enumerate(self.increment_rates, start=1):
            if alpha < 0 or (alpha == 0 and not self.allow_zero_rates):
                raise ValueError(f"task {j}: increment rate must be positive, got {alpha}")
        for p in (self.depot_position, *self.task_positions):
            if not (0.0 <= p[0] <= 1.0 and 0.0 <= p[1] <= 1.0):
                raise ValueError(f"position {p} lies outside the unit square")

    @property
    def n_tasks(self) -> int:
        return len(self.task_positions)


class TravelTimeMatrix:
    """Travel times between the depot (index 0) and tasks (indexes 1..N)."""

    __slots__ = ("times", "rows")

    def __init__(self, times: np.ndarray) -> None:
        times = np.array(times, dtype=float)
        times.setflags(write=False)
        self.times = times
        # plain lists are much faster to index in the simulator's inner loop
        self.rows: list[list[float]] = times.tolist()

    def __call__(self, i: int, j: int) -> float:
        return self.rows[i][j]


class ObjectiveVector(NamedTuple):
    makespan: float
    robot_count: int


class RobotBounds(NamedTuple):
    lbm: int
    ubm: int


def build_travel_times(instance: Instance) -> TravelTimeMatrix:
    """Euclidean distance over uniform speed, depot at index 0."""
    pts = np.array((instance.depot_position, *instance.task_positions), dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return TravelTimeMatrix(np.sqrt((diff**2).sum(axis=-1)) / instance.robot_speed)


def robot_bounds(instance: Instance) -> RobotBounds:
    """Smallest team able to finish every task and largest useful team.

    ``lbm = ceil(max(alpha) / beta)`` and
    ``ubm = sum(ceil(alpha_j / beta)) + 1``.
    """
    beta = instance.robot_ability
    lbm = max(1, math.ceil(max(instance.increment_rates) / beta))
    ubm = sum(math.ceil(a / beta) for a in instance.increment_rates) + 1
    return RobotBounds(lbm, max(lbm, ubm))


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """Pareto dominance for minimisation: ``a <= b`` everywhere and ``a != b``."""
    strictly = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly
