import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mompda.core import Instance
from mompda.instances import (
    BENCHMARK_TABLE,
    CENTRAL_DEPOT,
    ECCENTRIC_DEPOT,
    InstanceFormatError,
    InstanceSpec,
    RobotLayout,
    TaskLayout,
    benchmark_instance,
    benchmark_suite,
    dumps_instance,
    generate_instance,
    load_instance,
    loads_instance,
    parse_name,
    save_instance,
    table_spec,
)


def test_row_six_name():
    spec = InstanceSpec(10, RobotLayout("C"), TaskLayout("R"), (0.02, 0.05), (0.1, 0.2), seed=3)
    assert spec.name == "10_C_R_4.29"
    assert generate_instance(spec).name == "10_C_R_4.29"


def test_ratio_mean_over_mean():
    spec = InstanceSpec(10, RobotLayout("C"), TaskLayout("R"), (0.05, 0.08), (0.02, 0.05))
    assert spec.ratio == round(0.035 / 0.065, 2) == 0.54


def test_generation_deterministic():
    spec = table_spec(6, 42)
    assert generate_instance(spec) == generate_instance(spec)
    assert dumps_instance(generate_instance(spec)) == dumps_instance(generate_instance(spec))


@pytest.mark.parametrize("kwargs", [
    dict(ability_range=(0.05, 0.02)),
    dict(rate_range=(0.0, 0.1)),
    dict(n_tasks=0),
])
def test_invalid_spec_rejected(kwargs):
    base = dict(n_tasks=5, robot_layout=RobotLayout("C"), task_layout=TaskLayout("R"),
                ability_range=(0.02, 0.05), rate_range=(0.05, 0.1))
    base.update(kwargs)
    with pytest.raises(ValueError, match="range|n_tasks"):
        InstanceSpec(**base)


@pytest.fixture(scope="module")
def suite():
    return benchmark_suite(42)


def test_suite_has_every_table_row(suite):
    assert len(suite) == 45
    assert [i.name for i in suite] == [row[0] for row in BENCHMARK_TABLE]


def test_last_row(suite):
    last = suite[44]
    assert last.name == "120_EC_RCL_1.0"
    assert last.n_tasks == 120
    assert last.depot_position == ECCENTRIC_DEPOT


def test_suites_bit_identical(suite):
    again = benchmark_suite(42)
    assert [dumps_instance(a) for a in suite] == [dumps_instance(b) for b in again]


def test_different_master_seed_changes_instances(suite):
    assert dumps_instance(benchmark_suite(43)[0]) != dumps_instance(suite[0])


def test_values_within_spec_ranges(suite):
    for row, inst in zip(BENCHMARK_TABLE, suite):
        _, n, pr, _, beta_rng, alpha_rng = row
        assert inst.n_tasks == n
        assert beta_rng[0] <= inst.robot_ability <= beta_rng[1]
        assert inst.robot_ability == pytest.approx(sum(beta_rng) / 2)
        assert all(alpha_rng[0] <= a <= alpha_rng[1] for a in inst.increment_rates)
        assert all(0.5 <= q <= 1.5 for q in inst.initial_demands)
        assert all(0 <= x <= 1 and 0 <= y <= 1 for x, y in inst.task_positions)
        assert inst.depot_position == (CENTRAL_DEPOT if pr == "C" else ECCENTRIC_DEPOT)


def test_names_parse_back_bijectively():
    parsed = set()
    for row in BENCHMARK_TABLE:
        name, n, pr, pt, beta_rng, alpha_rng = row
        got = parse_name(name)
        assert got[:3] == (n, RobotLayout(pr), TaskLayout(pt))
        assert got[3] == round(sum(alpha_rng) / sum(beta_rng), 2)
        parsed.add(got)
    assert len(parsed) == 45


def test_suffix_rows_disambiguated():
    assert table_spec(9).name == "10_EC_RCL_1.86A"
    assert table_spec(5).name == "10_EC_RCL_1.86"


def test_clustered_tasks_are_tighter_than_random():
    def spread(row):
        inst = generate_instance(table_spec(row, 1))
        pts = np.array(inst.task_positions)
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        return d.min(axis=1).mean()

    # 60_C_CL_1.0 against 60_C_R_1.0A, same size and ranges
    names = [r[0] for r in BENCHMARK_TABLE]
    assert spread(names.index("60_C_CL_1.0A") + 1) < spread(names.index("60_C_R_1.0A") + 1)


def test_round_trip_whole_suite(suite, tmp_path):
    for inst in suite:
        path = tmp_path / f"{inst.name}.json"
        save_instance(inst, path)
        assert load_instance(path) == inst


@given(st.floats(0.0, 1.0), st.floats(1e-9, 10.0), st.floats(1e-6, 10.0))
def test_round_trip_exact_floats(x, q0, alpha):
    inst = Instance("p", (x, 1 - x), ((x, x),), (q0,), (alpha,), 0.1 + x, seed=2**64 - 1)
    assert loads_instance(dumps_instance(inst)) == inst


def test_json_layout():
    doc = json.loads(dumps_instance(benchmark_instance("5_C_CL_2.86", 0)))
    assert set(doc) == {"name", "depot", "tasks", "beta", "speed", "seed"}
    assert set(doc["tasks"][0]) == {"pos", "q0", "alpha"}


def test_missing_ability_names_the_field():
    doc = json.loads(dumps_instance(benchmark_instance("5_C_CL_2.86", 0)))
    del doc["beta"]
    with pytest.raises(InstanceFormatError, match="robot_ability"):
        loads_instance(json.dumps(doc))


def test_malformed_json_reports_line():
    with pytest.raises(InstanceFormatError, match="line 3, column 1"):
        loads_instance('{"name": "x",\n  "depot": [0, 0\n')


def test_bad_task_field_reports_location():
    text = '{"name": "x", "depot": [0, 0], "beta": 1, "tasks": [{"pos": [0.5, 0.5], "q0": "a", "alpha": 1}]}'
    with pytest.raises(InstanceFormatError, match=r"tasks\[0\]\.q0"):
        loads_instance(text)


def test_hand_written_single_task(tmp_path):
    path = tmp_path / "one.json"
    path.write_text('{"name": "one", "depot": [0, 0], "beta": 0.065, "speed": 1,'
                    ' "seed": 0, "tasks": [{"pos": [0.6, 0.8], "q0": 1, "alpha": 0.05}]}')
    inst = load_instance(path)
    assert inst.n_tasks == 1 and inst.robot_ability == 0.065


def test_load_error_mentions_path(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[]")
    with pytest.raises(InstanceFormatError, match="bad.json"):
        load_instance(path)
