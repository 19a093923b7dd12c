"""CSV artifacts written by experiment runs, all via atomic replace."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from .core import ObjectiveVector

FRONT_HEADER = ("makespan", "robot_count")
LOG_HEADER = ("generation", "evaluations", "archive_size", "best_by_budget")
INDICATOR_HEADER = ("algorithm", "instance", "seed", "hv", "igd")


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, csv_text(header, rows))


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_json(path: str | Path, doc) -> None:
    atomic_write_text(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")


def front_rows(front: Iterable[ObjectiveVector]) -> list[tuple[float, int]]:
    return sorted(((float(o[0]), int(o[1])) for o in front), key=lambda r: (r[1], r[0]))


def write_front_csv(path: str | Path, front: Iterable[ObjectiveVector]) -> None:
    """One row per archive entry, ordered by robot count."""
    write_csv(path, FRONT_HEADER, front_rows(front))


def read_front_csv(path: str | Path) -> list[ObjectiveVector]:
    rows = read_csv(path)
    if rows and set(FRONT_HEADER) - set(rows[0]):
        raise ValueError(f"{path}: expected columns {FRONT_HEADER}")
    return [ObjectiveVector(float(r["makespan"]), int(r["robot_count"])) for r in rows]


def write_run_log(path: str | Path, log: Iterable[dict]) -> None:
    write_csv(path, LOG_HEADER, ([row[k] for k in LOG_HEADER] for row in log))


def write_indicator_csv(path: str | Path, rows: Iterable[Sequence]) -> None:
    write_csv(path, INDICATOR_HEADER, rows)


def trajectory_timeline(events: Iterable[dict[str, str]]) -> list[tuple[int, int, float, float, float]]:
    """Turn a trajectory dump into ``(robot, task, depart, arrive, leave)`` intervals.

    A visit to a task that was already finished has no completion event;
    its ``leave`` equals its arrival.
    """
    open_visits: dict[int, list] = {}
    out = []
    for ev in events:
        robot, task, t = int(ev["robot"]), int(ev["task"]), float(ev["time"])
        kind = ev["event_type"]
        if kind == "depart":
            if robot in open_visits:
                v = open_visits.pop(robot)
                out.append((robot, v[0], v[1], v[2], v[2]))
            open_visits[robot] = [task, t, None]
        elif kind == "arrive":
            open_visits.setdefault(robot, [task, t, None])[2] = t
        elif kind == "complete":
            v = open_visits.pop(robot, [task, t, t])
            out.append((robot, task, v[1], v[2], t))
        else:
            raise ValueError(f"unknown event type {kind!r}")
    for robot, v in open_visits.items():
        if v[2] is not None:
            out.append((robot, v[0], v[1], v[2], v[2]))
    return sorted(out, key=lambda r: (r[0], r[2]))
