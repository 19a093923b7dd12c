import os

import pytest

from mompda.core import ObjectiveVector
from mompda.records import (
    atomic_write_text,
    read_front_csv,
    trajectory_timeline,
    write_front_csv,
    write_run_log,
)


def test_front_round_trip_and_order(tmp_path):
    front = [ObjectiveVector(10.5, 3), ObjectiveVector(0.1 + 0.2, 5), ObjectiveVector(20.0, 2)]
    path = tmp_path / "f.csv"
    write_front_csv(path, front)
    text = path.read_text()
    assert text.splitlines()[0] == "makespan,robot_count"
    assert read_front_csv(path) == sorted(front, key=lambda o: o.robot_count)
    assert "0.30000000000000004" in text


def test_front_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_front_csv(path)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    path = tmp_path / "sub" / "x.txt"
    atomic_write_text(path, "one")
    atomic_write_text(path, "two")
    assert path.read_text() == "two"
    assert os.listdir(path.parent) == ["x.txt"]


def test_run_log_columns(tmp_path):
    path = tmp_path / "log.csv"
    write_run_log(path, [{"generation": 1, "evaluations": 10, "archive_size": 2, "best_by_budget": "3:1.5"}])
    assert path.read_text().splitlines() == ["generation,evaluations,archive_size,best_by_budget",
                                             "1,10,2,3:1.5"]


def test_timeline_from_events():
    events = [
        {"robot": "1", "event_type": "depart", "task": "2", "time": "0.0"},
        {"robot": "1", "event_type": "arrive", "task": "2", "time": "1.0"},
        {"robot": "1", "event_type": "complete", "task": "2", "time": "3.0"},
        {"robot": "1", "event_type": "depart", "task": "1", "time": "3.0"},
        {"robot": "1", "event_type": "arrive", "task": "1", "time": "4.0"},
    ]
    assert trajectory_timeline(events) == [(1, 2, 0.0, 1.0, 3.0), (1, 1, 3.0, 4.0, 4.0)]
