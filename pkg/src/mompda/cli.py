"""Command line harness: ``generate``, ``run``, ``compare`` and ``plot-data``.

Every command writes plain files (JSON and CSV) so results can be checked
into a repository or post-processed elsewhere. Options may also come from a
JSON file given with ``--config``; flags on the command line take precedence.
"""

from __future__ import annotations

import argparse
import concurrent.futures as cf
import dataclasses
import json
import logging
import math
import os
import platform
import statistics
import sys
import time
import traceback
from itertools import combinations
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .baselines import BaselineConfig, run_moead, run_nsga2, run_random_search
from .core import Instance, RobotBounds, build_travel_times, robot_bounds
from .hdmoea import EngineConfig, RunResult, run_hdmoea
from .instances import (
    BENCHMARK_TABLE,
    InstanceFormatError,
    benchmark_instance,
    dumps_instance,
    generate_instance,
    load_instance,
    loads_instance,
    table_spec,
)
from .metrics import bonferroni, hv, igd, normalize_front, reference_front, wilcoxon_rank_sum
from .records import (
    atomic_write_text,
    read_csv,
    read_front_csv,
    trajectory_timeline,
    write_csv,
    write_front_csv,
    write_indicator_csv,
    write_json,
    write_run_log,
)
from .simulator import decode, write_trajectory_csv

log = logging.getLogger("mompda")

SEED_STRIDE = 10**6
SIGNIFICANCE = 0.05


class ConfigError(Exception):
    """Problem with user supplied options; reported with exit code 2."""


def _algorithms() -> dict[str, Callable[[Instance, dict, int], RunResult]]:
    def engine(inst, params, seed):
        return run_hdmoea(inst, EngineConfig(**params), seed)

    def with_baseline(fn, **extra):
        def run(inst, params, seed):
            return fn(inst, BaselineConfig(**params, **extra), seed)
        return run

    return {
        "hdmoea": engine,
        "nsga2": with_baseline(run_nsga2),
        "moead": with_baseline(run_moead),
        "moead-dra": with_baseline(run_moead, use_dra=True),
        "random": with_baseline(run_random_search),
    }


ALGORITHMS = tuple(_algorithms())


def package_version() -> str:
    try:
        from importlib.metadata import version
        return version("artifact")
    except Exception:
        return "unknown"


def _environment() -> dict:
    return {
        "package": package_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


# --------------------------------------------------------------------------- config


@dataclasses.dataclass
class ExperimentConfig:
    instances: list = dataclasses.field(default_factory=list)
    algorithms: list[str] = dataclasses.field(default_factory=lambda: ["hdmoea"])
    runs: int = 20
    seed: int = 0
    nfe: int = EngineConfig.nfe_budget
    pop_size: int = EngineConfig.pop_size
    workers: int | None = None
    out: str = "results"
    trajectories: bool = False

    def validate(self) -> None:
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.nfe < 0:
            raise ConfigError("nfe must be non-negative")
        if self.pop_size < 2:
            raise ConfigError("pop_size must be >= 2")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.instances:
            raise ConfigError("no instances given (use --instance, --benchmark or the config file)")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"{path}: unknown keys {sorted(extra)}")
    return doc


def resolve_instance(ref) -> Instance:
    """Instance from a file path, ``NAME`` / ``NAME@SEED`` benchmark reference or dict."""
    try:
        if isinstance(ref, dict):
            if "path" in ref:
                return load_instance(ref["path"])
            if "row" in ref:
                return generate_instance(table_spec(int(ref["row"]), int(ref.get("seed", 0))))
            if "benchmark" in ref:
                return benchmark_instance(ref["benchmark"], int(ref.get("seed", 0)))
            raise ConfigError(f"instance entry needs 'path', 'row' or 'benchmark': {ref}")
        ref = str(ref)
        if ref.endswith(".json") or os.sep in ref:
            return load_instance(ref)
        name, _, seed = ref.partition("@")
        return benchmark_instance(name, int(seed) if seed else 0)
    except (OSError, KeyError, InstanceFormatError, ValueError) as exc:
        raise ConfigError(f"cannot resolve instance {ref!r}: {exc}") from exc


# --------------------------------------------------------------------------- generate


def cmd_generate(args: argparse.Namespace) -> int:
    if args.all:
        rows = list(range(1, len(BENCHMARK_TABLE) + 1))
    elif args.row:
        rows = sorted(set(args.row))
    else:
        raise ConfigError("choose --all or at least one --row")
    for r in rows:
        if not 1 <= r <= len(BENCHMARK_TABLE):
            raise ConfigError(f"--row must be in 1..{len(BENCHMARK_TABLE)}, got {r}")
    out = Path(args.out)
    entries = []
    for r in rows:
        spec = table_spec(r, args.seed)
        inst = generate_instance(spec)
        path = out / f"{inst.name}.json"
        try:
            atomic_write_text(path, dumps_instance(inst))
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc}") from exc
        entries.append({"row": r, "name": inst.name, "seed": spec.seed, "file": path.name})
        log.info("wrote %s", path)
    manifest = {"master_seed": args.seed, "instances": entries, "environment": _environment()}
    write_json(out / "manifest.json", manifest)
    print(f"{len(entries)} instance(s) written to {out}")
    return 0


# --------------------------------------------------------------------------- run


def _run_paths(out: Path, algo: str, instance: str, index: int) -> dict[str, Path]:
    base = out / "runs" / algo / instance / f"run_{index:03d}"
    return {k: base.with_name(base.name + suffix) for k, suffix in
            (("front", ".front.csv"), ("log", ".log.csv"), ("meta", ".meta.json"),
             ("trajectory", ".trajectory.csv"))}


def execute_run(job: dict) -> dict:
    """Run one (algorithm, instance, seed) job and write its artifacts."""
    instance = loads_instance(job["instance_json"])
    paths = {k: Path(v) for k, v in job["paths"].items()}
    params = {"pop_size": job["pop_size"], "nfe_budget": job["nfe"]}
    start = time.perf_counter()
    result = _algorithms()[job["algorithm"]](instance, params, job["seed"])
    wall = time.perf_counter() - start
    write_front_csv(paths["front"], result.archive.front())
    write_run_log(paths["log"], result.log)
    if job.get("trajectories") and len(result.archive):
        best = min(result.archive, key=lambda e: (e.objectives.makespan, e.objectives.robot_count))
        ev = decode(instance, build_travel_times(instance), best.solution, record_trajectory=True)
        tmp = paths["trajectory"].with_suffix(".tmp")
        write_trajectory_csv(ev, tmp)
        os.replace(tmp, paths["trajectory"])
    meta = {
        "algorithm": job["algorithm"],
        "instance": instance.name,
        "run_index": job["run_index"],
        "seed": job["seed"],
        "nfe": job["nfe"],
        "pop_size": job["pop_size"],
        "evaluations": result.evaluations,
        "wall_time_s": wall,
        "lbm": result.bounds.lbm,
        "ubm": result.bounds.ubm,
        "front_size": len(result.archive),
        "front_file": paths["front"].name,
    }
    # the meta file is written last and marks the run as complete
    write_json(paths["meta"], meta)
    return meta


def build_jobs(cfg: ExperimentConfig) -> list[dict]:
    out = Path(cfg.out)
    jobs = []
    for ref in cfg.instances:
        inst = resolve_instance(ref)
        text = dumps_instance(inst)
        for algo in cfg.algorithms:
            for i in range(cfg.runs):
                jobs.append({
                    "algorithm": algo,
                    "instance_json": text,
                    "instance": inst.name,
                    "run_index": i,
                    "seed": cfg.seed * SEED_STRIDE + i,
                    "nfe": cfg.nfe,
                    "pop_size": cfg.pop_size,
                    "trajectories": cfg.trajectories,
                    "paths": {k: str(v) for k, v in _run_paths(out, algo, inst.name, i).items()},
                })
    return jobs


def _merge_config(args: argparse.Namespace) -> ExperimentConfig:
    doc = _load_config_file(args.config)
    cfg = ExperimentConfig(**doc)
    if args.instance or args.benchmark:
        cfg.instances = [*(args.instance or []), *(args.benchmark or [])]
    for name in ("runs", "seed", "nfe", "pop_size", "workers", "out"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if args.algo:
        cfg.algorithms = args.algo
    if args.trajectories:
        cfg.trajectories = True
    cfg.validate()
    return cfg


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    jobs = build_jobs(cfg)
    out = Path(cfg.out)
    write_json(out / "manifest.json", {
        "config": dataclasses.asdict(cfg),
        "seed_policy": f"run seed = seed * {SEED_STRIDE} + run index",
        "engine_defaults": dataclasses.asdict(EngineConfig(pop_size=cfg.pop_size, nfe_budget=cfg.nfe)),
        "baseline_defaults": dataclasses.asdict(BaselineConfig(pop_size=cfg.pop_size, nfe_budget=cfg.nfe)),
        "environment": _environment(),
        "jobs": [{k: j[k] for k in ("algorithm", "instance", "run_index", "seed")} for j in jobs],
    })
    workers = cfg.workers or os.cpu_count() or 1
    failures = []
    done = 0
    if workers == 1:
        for job in jobs:
            try:
                execute_run(job)
                done += 1
            except Exception:
                failures.append((job, traceback.format_exc()))
    else:
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(execute_run, job): job for job in jobs}
            for fut in cf.as_completed(futures):
                try:
                    fut.result()
                    done += 1
                except Exception:
                    failures.append((futures[fut], traceback.format_exc()))
    for job, tb in failures:
        print(f"run failed: {job['algorithm']} {job['instance']} run {job['run_index']}\n{tb}",
              file=sys.stderr)
    print(f"{done}/{len(jobs)} run(s) completed in {out}")
    return 1 if failures else 0


# --------------------------------------------------------------------------- compare


def load_runs(root: Path) -> list[dict]:
    metas = []
    for path in sorted(root.glob("**/*.meta.json")):
        meta = json.loads(path.read_text(encoding="utf-8"))
        meta["front"] = read_front_csv(path.parent / meta["front_file"])
        metas.append(meta)
    return metas


def compare_runs(metas: Sequence[dict]) -> dict:
    """Indicators per run, summary table and pairwise rank-sum tests."""
    if not metas:
        raise ConfigError("no completed runs found")
    by_instance: dict[str, list[dict]] = {}
    for m in metas:
        by_instance.setdefault(m["instance"], []).append(m)

    indicator_rows, summary_rows, test_rows = [], [], []
    for inst in sorted(by_instance):
        runs = by_instance[inst]
        nfes = {m["nfe"] for m in runs}
        if len(nfes) > 1:
            raise ConfigError(f"{inst}: runs use different evaluation budgets {sorted(nfes)}")
        algos = sorted({m["algorithm"] for m in runs})
        counts = {a: sum(1 for m in runs if m["algorithm"] == a) for a in algos}
        if len(set(counts.values())) > 1:
            raise ConfigError(f"{inst}: unequal run counts {counts}")
        bounds = RobotBounds(runs[0]["lbm"], runs[0]["ubm"])
        fronts = [normalize_front(m["front"], bounds) for m in runs]
        ref = reference_front(fronts) if any(fronts) else []
        values: dict[str, dict[str, list[float]]] = {a: {"hv": [], "igd": []} for a in algos}
        for m, pts in sorted(zip(runs, fronts), key=lambda t: (t[0]["algorithm"], t[0]["run_index"])):
            h = hv(pts)
            d = igd(ref, pts) if ref else math.inf
            values[m["algorithm"]]["hv"].append(h)
            values[m["algorithm"]]["igd"].append(d)
            indicator_rows.append((m["algorithm"], inst, m["seed"], h, d))
        for a in algos:
            row = [a, inst, counts[a]]
            for key in ("hv", "igd"):
                v = values[a][key]
                row += [statistics.fmean(v), statistics.stdev(v) if len(v) > 1 else 0.0]
            summary_rows.append(tuple(row))
        pairs = list(combinations(algos, 2))
        for key in ("hv", "igd"):
            raw = []
            for a, b in pairs:
                va, vb = values[a][key], values[b][key]
                raw.append(wilcoxon_rank_sum(va, vb) if min(len(va), len(vb)) >= 3 else math.nan)
            adjusted = bonferroni(raw)
            for (a, b), p, q in zip(pairs, raw, adjusted):
                test_rows.append((inst, key, a, b, p, q, bool(q < SIGNIFICANCE)))
    return {"indicators": indicator_rows, "summary": summary_rows, "tests": test_rows}


def cmd_compare(args: argparse.Namespace) -> int:
    root = Path(args.runs_dir)
    if not root.is_dir():
        raise ConfigError(f"{root} is not a directory")
    report = compare_runs(load_runs(root))
    out = Path(args.out or root / "report")
    write_indicator_csv(out / "indicators.csv", report["indicators"])
    write_csv(out / "summary.csv",
              ("algorithm", "instance", "runs", "hv_mean", "hv_std", "igd_mean", "igd_std"),
              report["summary"])
    write_csv(out / "wilcoxon.csv",
              ("instance", "indicator", "algorithm_a", "algorithm_b", "p_value", "p_bonferroni",
               "significant"),
              report["tests"])
    print(f"{'algorithm':<10} {'instance':<18} {'runs':>4} {'HV mean':>9} {'HV std':>9} "
          f"{'IGD mean':>9} {'IGD std':>9}")
    for a, inst, n, hm, hs, im, is_ in report["summary"]:
        print(f"{a:<10} {inst:<18} {n:>4} {hm:9.4f} {hs:9.4f} {im:9.4f} {is_:9.4f}")
    for inst, key, a, b, p, q, sig in report["tests"]:
        print(f"{inst} {key}: {a} vs {b} p={p:.4g} (Bonferroni {q:.4g}){' *' if sig else ''}")
    return 0


# --------------------------------------------------------------------------- plot-data


def _svg_scatter(points: Sequence[tuple[float, float]], title: str) -> str:
    size, pad = 400, 40
    scale = (size - 2 * pad) / 1.1

    def xy(p):
        return pad + p[0] * scale, size - pad - p[1] * scale

    dots = "\n".join(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#1f77b4"/>' for x, y in map(xy, points))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
        f'<rect x="{pad}" y="{pad}" width="{size - 2 * pad}" height="{size - 2 * pad}" '
        f'fill="none" stroke="#888"/>\n'
        f'<text x="{size / 2}" y="20" text-anchor="middle" font-size="12">{title}</text>\n'
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="11">normalised makespan</text>\n'
        f'<text x="12" y="{size / 2}" font-size="11" transform="rotate(-90 12 {size / 2})" '
        f'text-anchor="middle">normalised robot count</text>\n{dots}\n</svg>\n'
    )


def _bounds_for(front_path: Path, instance_ref: str | None) -> RobotBounds:
    if instance_ref:
        return robot_bounds(resolve_instance(instance_ref))
    meta_path = Path(str(front_path).replace(".front.csv", ".meta.json"))
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        return RobotBounds(meta["lbm"], meta["ubm"])
    raise ConfigError(f"{front_path}: no run metadata next to it; pass --instance")


def cmd_plot_data(args: argparse.Namespace) -> int:
    if not args.front and not args.trajectory:
        raise ConfigError("give --front and/or --trajectory")
    out = Path(args.out)
    for f in args.front or []:
        path = Path(f)
        try:
            front = read_front_csv(path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read front {path}: {exc}") from exc
        pts = normalize_front(front, _bounds_for(path, args.instance))
        stem = path.name.removesuffix(".csv").removesuffix(".front")
        rows = [(o.makespan, o.robot_count, p.ob1, p.ob2) for o, p in zip(front, pts)]
        write_csv(out / f"{stem}.scatter.csv", ("makespan", "robot_count", "ob1", "ob2"), rows)
        if args.svg:
            atomic_write_text(out / f"{stem}.svg", _svg_scatter(pts, stem))
    for f in args.trajectory or []:
        path = Path(f)
        try:
            events = read_csv(path)
        except OSError as exc:
            raise ConfigError(f"cannot read trajectory {path}: {exc}") from exc
        stem = path.name.removesuffix(".csv").removesuffix(".trajectory")
        write_csv(out / f"{stem}.timeline.csv", ("robot", "task", "depart", "arrive", "leave"),
                  trajectory_timeline(events))
    print(f"plot data written to {out}")
    return 0


# --------------------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mompda", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write benchmark instances as JSON")
    g.add_argument("--all", action="store_true", help="all benchmark rows")
    g.add_argument("--row", type=int, action="append", help="1-based benchmark row (repeatable)")
    g.add_argument("--seed", type=int, default=0, help="master seed")
    g.add_argument("--out", default="instances")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run algorithms on instances")
    r.add_argument("--config", help="JSON file with experiment settings")
    r.add_argument("--instance", action="append", help="instance JSON file (repeatable)")
    r.add_argument("--benchmark", action="append", help="benchmark name, optionally NAME@SEED")
    r.add_argument("--algo", action="append", choices=ALGORITHMS)
    r.add_argument("--runs", type=int)
    r.add_argument("--seed", type=int, help="base seed")
    r.add_argument("--nfe", type=int, help="evaluation budget per run")
    r.add_argument("--pop-size", dest="pop_size", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out")
    r.add_argument("--trajectories", action="store_true",
                   help="also dump the trajectory of each run's best-makespan solution")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="indicator tables and rank-sum tests over finished runs")
    c.add_argument("runs_dir")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot-data", help="plot-ready files from fronts or trajectories")
    p.add_argument("--front", action="append")
    p.add_argument("--trajectory", action="append")
    p.add_argument("--instance", help="instance used to normalise fronts without run metadata")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out", default="plots")
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
