"""Bi-objective multi-point dynamic aggregation: simulator, solvers and harness."""

from .archive import ParetoArchive
from .baselines import BaselineConfig, run_moead, run_nsga2, run_random_search
from .construction import heuristic_solution, hybrid_init, random_solution
from .core import Instance, ObjectiveVector, RobotBounds, build_travel_times, robot_bounds
from .hdmoea import EngineConfig, RunResult, run_hdmoea
from .instances import benchmark_instance, benchmark_suite, generate_instance, load_instance, save_instance
from .metrics import hv, igd, normalize, wilcoxon_rank_sum
from .simulator import Evaluation, complete_time, decode

__all__ = [
    "BaselineConfig", "EngineConfig", "Evaluation", "Instance", "ObjectiveVector", "ParetoArchive",
    "RobotBounds", "RunResult", "benchmark_instance", "benchmark_suite", "build_travel_times",
    "complete_time", "decode", "generate_instance", "heuristic_solution", "hv", "hybrid_init", "igd",
    "load_instance", "normalize", "random_solution", "robot_bounds", "run_hdmoea", "run_moead",
    "run_nsga2", "run_random_search", "save_instance", "wilcoxon_rank_sum",
]
