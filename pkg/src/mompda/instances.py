"""Benchmark instance generator and JSON persistence."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Instance

CLUSTER_SIGMA = 0.05
CENTRAL_DEPOT = (0.5, 0.5)
ECCENTRIC_DEPOT = (0.05, 0.05)
INITIAL_DEMAND_RANGE = (0.5, 1.5)


class RobotLayout(str, enum.Enum):
    CENTRAL = "C"
    ECCENTRIC = "EC"


class TaskLayout(str, enum.Enum):
    RANDOM = "R"
    CLUSTERED = "CL"
    RANDOM_CLUSTERED = "RCL"


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed."""


@dataclass(frozen=True)
class InstanceSpec:
    n_tasks: int
    robot_layout: RobotLayout
    task_layout: TaskLayout
    ability_range: tuple[float, float]
    rate_range: tuple[float, float]
    seed: int = 0
    suffix: str = ""

    def __post_init__(self) -> None:
        if self.n_tasks < 1:
            raise ValueError(f"n_tasks must be >= 1, got {self.n_tasks}")
        for label, (lo, hi) in (("ability_range", self.ability_range), ("rate_range", self.rate_range)):
            if not 0 < lo <= hi:
                raise ValueError(f"{label} must satisfy 0 < low <= high, got [{lo}, {hi}]")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def ratio(self) -> float:
        return round(sum(self.rate_range) / sum(self.ability_range), 2)

    @property
    def name(self) -> str:
        return (f"{self.n_tasks}_{self.robot_layout.value}_{self.task_layout.value}_"
                f"{self.ratio}{self.suffix}")


# (name, N, PR, PT, beta range, alpha range), in table order
BENCHMARK_TABLE: tuple[tuple[str, int, str, str, tuple[float, float], tuple[float, float]], ...] = (
    ("5_C_CL_2.86", 5, "C", "CL", (0.02, 0.05), (0.05, 0.15)),
    ("5_EC_RCL_2.86", 5, "EC", "RCL", (0.02, 0.05), (0.05, 0.15)),
    ("10_C_R_0.54", 10, "C", "R", (0.05, 0.08), (0.02, 0.05)),
    ("10_EC_CL_0.54", 10, "EC", "CL", (0.05, 0.08), (0.02, 0.05)),
    ("10_EC_RCL_1.86", 10, "EC", "RCL", (0.02, 0.05), (0.05, 0.08)),
    ("10_C_R_4.29", 10, "C", "R", (0.02, 0.05), (0.1, 0.2)),
    ("10_C_RCL_1.86", 10, "C", "RCL", (0.02, 0.05), (0.05, 0.08)),
    ("10_C_CL_1.0", 10, "C", "CL", (0.05, 0.08), (0.05, 0.08)),
    ("10_EC_RCL_1.86A", 10, "EC", "RCL", (0.02, 0.05), (0.05, 0.08)),
    ("10_C_CL_1.86", 10, "C", "CL", (0.02, 0.05), (0.05, 0.08)),
    ("10_C_R_1.86", 10, "C", "R", (0.02, 0.05), (0.05, 0.08)),
    ("10_C_CL_4.29", 10, "C", "CL", (0.02, 0.05), (0.1, 0.2)),
    ("10_EC_R_2.86", 10, "EC", "R", (0.02, 0.05), (0.05, 0.15)),
    ("15_EC_CL_1.0", 15, "EC", "CL", (0.05, 0.08), (0.05, 0.08)),
    ("15_EC_CL_1.0A", 15, "EC", "CL", (0.02, 0.05), (0.02, 0.05)),
    ("15_EC_CL_1.86", 15, "EC", "CL", (0.02, 0.05), (0.05, 0.08)),
    ("15_C_RCL_4.29", 15, "C", "RCL", (0.02, 0.05), (0.1, 0.2)),
    ("20_EC_R_1.0", 20, "EC", "R", (0.05, 0.08), (0.05, 0.08)),
    ("20_C_R_2.86", 20, "C", "R", (0.02, 0.05), (0.05, 0.15)),
    ("20_EC_CL_0.54", 20, "EC", "CL", (0.05, 0.08), (0.02, 0.05)),
    ("20_C_R_4.29", 20, "C", "R", (0.02, 0.05), (0.1, 0.2)),
    ("20_EC_R_0.54", 20, "EC", "R", (0.05, 0.08), (0.02, 0.05)),
    ("20_EC_RCL_1.0", 20, "EC", "RCL", (0.05, 0.08), (0.05, 0.08)),
    ("20_EC_RCL_2.86", 20, "EC", "RCL", (0.02, 0.05), (0.05, 0.15)),
    ("20_C_RCL_4.29", 20, "C", "RCL", (0.02, 0.05), (0.1, 0.2)),
    ("30_C_CL_1.0", 30, "C", "CL", (0.02, 0.05), (0.02, 0.05)),
    ("30_EC_R_1.0", 30, "EC", "R", (0.02, 0.05), (0.02, 0.05)),
    ("30_C_RCL_1.86", 30, "C", "RCL", (0.02, 0.05), (0.05, 0.08)),
    ("30_EC_CL_2.86", 30, "EC", "CL", (0.02, 0.05), (0.05, 0.15)),
    ("30_C_R_4.29", 30, "C", "R", (0.02, 0.05), (0.1, 0.2)),
    ("40_C_R_0.54", 40, "C", "R", (0.05, 0.08), (0.02, 0.05)),
    ("40_C_CL_1.86", 40, "C", "CL", (0.02, 0.05), (0.05, 0.08)),
    ("40_EC_CL_1.0", 40, "EC", "CL", (0.02, 0.05), (0.02, 0.05)),
    ("40_EC_R_1.86", 40, "EC", "R", (0.02, 0.05), (0.05, 0.08)),
    ("40_EC_R_4.29", 40, "EC", "R", (0.02, 0.05), (0.1, 0.2)),
    ("60_C_CL_1.0", 60, "C", "CL", (0.02, 0.05), (0.02, 0.05)),
    ("60_C_R_0.54", 60, "C", "R", (0.05, 0.08), (0.02, 0.05)),
    ("60_C_R_1.0", 60, "C", "R", (0.05, 0.08), (0.05, 0.08)),
    ("60_C_CL_1.0A", 60, "C", "CL", (0.02, 0.05), (0.02, 0.05)),
    ("60_C_R_1.0A", 60, "C", "R", (0.02, 0.05), (0.02, 0.05)),
    ("60_EC_R_1.0", 60, "EC", "R", (0.02, 0.05), (0.02, 0.05)),
    ("80_EC_CL_1.0", 80, "EC", "CL", (0.02, 0.05), (0.02, 0.05)),
    ("80_EC_CL_0.54", 80, "EC", "CL", (0.05, 0.08), (0.02, 0.05)),
    ("80_EC_R_0.54", 80, "EC", "R", (0.05, 0.08), (0.02, 0.05)),
    ("120_EC_RCL_1.0", 120, "EC", "RCL", (0.05, 0.08), (0.05, 0.08)),
)


def row_seed(master_seed: int, row: int) -> int:
    """Per-row 64-bit seed derived from ``master_seed`` and the 1-based row id."""
    ss = np.random.SeedSequence([int(master_seed), int(row)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def table_spec(row: int, master_seed: int = 0) -> InstanceSpec:
    """Spec of benchmark row ``row`` (1-based)."""
    if not 1 <= row <= len(BENCHMARK_TABLE):
        raise ValueError(f"row must be in 1..{len(BENCHMARK_TABLE)}, got {row}")
    name, n, pr, pt, beta_rng, alpha_rng = BENCHMARK_TABLE[row - 1]
    spec = InstanceSpec(n, RobotLayout(pr), TaskLayout(pt), beta_rng, alpha_rng,
                        row_seed(master_seed, row))
    suffix = name[len(spec.name):]
    spec = InstanceSpec(n, spec.robot_layout, spec.task_layout, beta_rng, alpha_rng, spec.seed, suffix)
    assert spec.name == name, (spec.name, name)
    return spec


def parse_name(name: str) -> tuple[int, RobotLayout, TaskLayout, float, str]:
    """Split ``"10_EC_RCL_1.86A"`` into ``(10, ECCENTRIC, RANDOM_CLUSTERED, 1.86, "A")``."""
    n, pr, pt, ratio = name.split("_")
    suffix = ratio.lstrip("0123456789.")
    return int(n), RobotLayout(pr), TaskLayout(pt), float(ratio[: len(ratio) - len(suffix)]), suffix


def _clustered_point(rng: np.random.Generator, centres: np.ndarray) -> tuple[float, float]:
    c = centres[rng.integers(len(centres))]
    x, y = np.clip(c + rng.normal(0.0, CLUSTER_SIGMA, size=2), 0.0, 1.0)
    return float(x), float(y)


def generate_instance(spec: InstanceSpec) -> Instance:
    """Draw an instance from ``spec``; identical specs yield identical instances."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n_tasks
    depot = CENTRAL_DEPOT if spec.robot_layout is RobotLayout.CENTRAL else ECCENTRIC_DEPOT
    k = max(2, math.ceil(n / 10))
    centres = rng.uniform(0.0, 1.0, size=(k, 2))
    positions = []
    for _ in range(n):
        layout = spec.task_layout
        if layout is TaskLayout.RANDOM_CLUSTERED:
            layout = TaskLayout.RANDOM if rng.random() < 0.5 else TaskLayout.CLUSTERED
        if layout is TaskLayout.RANDOM:
            x, y = rng.uniform(0.0, 1.0, size=2)
            positions.append((float(x), float(y)))
        else:
            positions.append(_clustered_point(rng, centres))
    alphas = rng.uniform(*spec.rate_range, size=n)
    q0 = rng.uniform(*INITIAL_DEMAND_RANGE, size=n)
    beta = (spec.ability_range[0] + spec.ability_range[1]) / 2
    return Instance(
        name=spec.name,
        depot_position=depot,
        task_positions=tuple(positions),
        initial_demands=tuple(float(v) for v in q0),
        increment_rates=tuple(float(v) for v in alphas),
        robot_ability=beta,
        seed=spec.seed,
    )


def benchmark_suite(master_seed: int = 0) -> list[Instance]:
    return [generate_instance(table_spec(row, master_seed)) for row in range(1, len(BENCHMARK_TABLE) + 1)]


def benchmark_instance(name: str, master_seed: int = 0) -> Instance:
    for row, entry in enumerate(BENCHMARK_TABLE, start=1):
        if entry[0] == name:
            return generate_instance(table_spec(row, master_seed))
    raise KeyError(f"no benchmark row named {name!r}")


def instance_to_dict(instance: Instance) -> dict:
    return {
        "name": instance.name,
        "depot": list(instance.depot_position),
        "tasks": [
            {"pos": list(p), "q0": q0, "alpha": a}
            for p, q0, a in zip(instance.task_positions, instance.initial_demands, instance.increment_rates)
        ],
        "beta": instance.robot_ability,
        "speed": instance.robot_speed,
        "seed": instance.seed,
    }


def dumps_instance(instance: Instance) -> str:
    # json writes floats with repr(), the shortest string that round-trips exactly
    return json.dumps(instance_to_dict(instance), indent=1) + "\n"


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(instance), encoding="utf-8")


_MEANING = {"beta": "robot_ability", "depot": "depot_position", "speed": "robot_speed"}


def _field(doc: dict, key: str, where: str = "document"):
    if key not in doc:
        meaning = f" ({_MEANING[key]})" if key in _MEANING else ""
        raise InstanceFormatError(f"{where}: missing required field {key!r}{meaning}")
    return doc[key]


def _point(value, where: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2 or not all(isinstance(v, (int, float)) for v in value):
        raise InstanceFormatError(f"{where}: expected [x, y], got {value!r}")
    return float(value[0]), float(value[1])


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("document: expected a JSON object")
    tasks = _field(doc, "tasks")
    if not isinstance(tasks, list):
        raise InstanceFormatError("tasks: expected an array")
    positions, q0s, alphas = [], [], []
    for i, task in enumerate(tasks):
        where = f"tasks[{i}]"
        if not isinstance(task, dict):
            raise InstanceFormatError(f"{where}: expected an object")
        positions.append(_point(_field(task, "pos", where), f"{where}.pos"))
        q0s.append(_number(_field(task, "q0", where), f"{where}.q0"))
        alphas.append(_number(_field(task, "alpha", where), f"{where}.alpha"))
    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise InstanceFormatError(f"seed: expected an integer, got {seed!r}")
    name = _field(doc, "name")
    if not isinstance(name, str):
        raise InstanceFormatError(f"name: expected a string, got {name!r}")
    try:
        return Instance(
            name=name,
            depot_position=_point(_field(doc, "depot"), "depot"),
            task_positions=tuple(positions),
            initial_demands=tuple(q0s),
            increment_rates=tuple(alphas),
            robot_ability=_number(_field(doc, "beta"), "beta"),
            robot_speed=_number(doc.get("speed", 1.0), "speed"),
            seed=seed,
        )
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def load_instance(path: str | Path) -> Instance:
    try:
        return loads_instance(Path(path).read_text(encoding="utf-8"))
    except InstanceFormatError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc
