import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mompda.construction import (
    ASCENDING,
    DESCENDING,
    HeuristicConfig,
    PredictionState,
    complement,
    construct,
    heuristic_solution,
    hybrid_init,
    predict_times,
    random_solution,
)
from mompda.core import Instance, TravelTimeMatrix, build_travel_times
from mompda.instances import benchmark_instance
from mompda.operators import is_permutation_matrix
from mompda.simulator import decode

from oracles import small_instance


def test_random_single_task_rows():
    inst = Instance("s", (0.0, 0.0), ((0.5, 0.5),), (1.0,), (0.1,), 1.0)
    assert random_solution(inst, 3, np.random.default_rng(0)) == ((1,), (1,), (1,))


def test_random_rows_valid_over_many_draws():
    inst = benchmark_instance("10_C_R_4.29", 0)
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        sol = random_solution(inst, int(rng.integers(1, 4)), rng)
        assert is_permutation_matrix(sol, 10)


def test_random_reproducible():
    inst = benchmark_instance("10_C_R_4.29", 0)
    a = random_solution(inst, 4, np.random.default_rng(9))
    b = random_solution(inst, 4, np.random.default_rng(9))
    assert a == b


def test_random_rejects_zero_robots():
    with pytest.raises(ValueError):
        random_solution(benchmark_instance("10_C_R_4.29", 0), 0, np.random.default_rng(0))


def test_predict_idle_robot_at_depot():
    inst = Instance("p", (0.0, 0.0), ((1.0, 0.0),), (1.0,), (0.0,), 1.0, allow_zero_rates=True)
    state = PredictionState(inst, build_travel_times(inst), 1)
    assert predict_times(state, 0, 1) == (1.0, 2.0)


def test_predict_infinite_when_rate_stays_non_negative():
    inst = Instance("p", (0.0, 0.0), ((1.0, 0.0),), (1.0,), (2.0,), 1.0)
    state = PredictionState(inst, build_travel_times(inst), 2)
    at, ct = predict_times(state, 0, 1)
    assert at == 1.0 and ct == math.inf


def test_predict_late_joiner_keeps_completion():
    # robot 0 starts on the task at the depot and finishes it at t=1;
    # robot 1 is far away, so joining changes nothing
    inst = Instance("p", (0.0, 0.0), ((0.0, 0.0), (1.0, 1.0)), (1.0, 1.0), (0.0, 0.1), 1.0,
                    allow_zero_rates=True)
    state = PredictionState(inst, build_travel_times(inst), 2)
    state.commit(0, 1, 0.0)
    state.location[1], state.available[1] = 2, 0.5
    at, ct = predict_times(state, 1, 1)
    assert at > state.completion[1]
    assert ct == state.completion[1] == 1.0


def _two_task_travel():
    # depot->1 = 1, depot->2 = 5, 1->2 = 4.5
    t = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 4.5], [5.0, 4.5, 0.0]])
    return TravelTimeMatrix(t)


def test_heuristic_prefers_nearer_task_by_arrival_rank():
    inst = Instance("h", (0.0, 0.0), ((0.1, 0.0), (0.5, 0.0)), (1.0, 1.0), (0.1, 0.1), 1.0)
    cfg = HeuristicConfig(weights=(1.0,), rb_modes=(ASCENDING,))
    res = heuristic_solution(inst, 1, np.random.default_rng(0), travel=_two_task_travel(), config=cfg)
    assert res.solution[0][0] == 1
    assert construct(inst, _two_task_travel(), 1, 1.0, ASCENDING)[0][0] == 1


def test_heuristic_single_task_all_candidates_identical():
    inst = Instance("s", (0.0, 0.0), ((0.6, 0.8),), (1.0,), (0.05,), 0.065)
    travel = build_travel_times(inst)
    builds = {construct(inst, travel, 2, w, rb) for w in HeuristicConfig().weights
              for rb in (ASCENDING, DESCENDING)}
    assert builds == {((1,), (1,))}
    res = heuristic_solution(inst, 2)
    assert res.solution == ((1,), (1,))
    assert res.n_evaluations == 22 and not res.all_infeasible


def test_heuristic_flags_all_infeasible():
    inst = Instance("inf", (0.0, 0.0), ((0.6, 0.8),), (1.0,), (2.0,), 1.0)
    res = heuristic_solution(inst, 1)
    assert res.all_infeasible and not res.evaluation.feasible


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_heuristic_rows_are_permutations(seed, m):
    inst = small_instance(np.random.default_rng(seed), max_tasks=6)
    res = heuristic_solution(inst, m, np.random.default_rng(seed))
    assert is_permutation_matrix(res.solution, inst.n_tasks)
    assert len(res.solution) == m
    assert res.evaluation == decode(inst, build_travel_times(inst), res.solution)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_predicted_arrival_matches_decode(seed):
    rng = np.random.default_rng(seed)
    inst = small_instance(rng, max_tasks=4)
    travel = build_travel_times(inst)
    n = inst.n_tasks
    first, second = (int(v) + 1 for v in rng.permutation(n)[:2]) if n > 1 else (1, None)
    state = PredictionState(inst, travel, 1)
    at1, _ = predict_times(state, 0, first)
    rest = [j for j in range(1, n + 1) if j not in (first, second)]
    row = [first] + ([second] if second else []) + rest
    ev = decode(inst, travel, [row])
    assert ev.arrival_events[0][0] == (first, at1)
    if second is None or ev.completion_times[first - 1] == math.inf:
        return
    state.commit(0, first, at1)
    at2, _ = predict_times(state, 0, second)
    assert ev.arrival_events[0][1] == (second, at2)


def test_complement_restores_permutations():
    rows = ((3,), (), (2, 1))
    full = complement(rows, 4, np.random.default_rng(0))
    assert is_permutation_matrix(full, 4)
    assert full[0][0] == 3 and full[2][:2] == (2, 1)


def test_hybrid_init_first_seen_rule():
    inst = benchmark_instance("10_C_R_4.29", 0)
    calls = []

    def heuristic(m):
        calls.append(m)
        return random_solution(inst, m, np.random.default_rng(m))

    out = hybrid_init(inst, [2, 2, 3], np.random.default_rng(0), heuristic)
    assert [o for o, _ in out] == ["heuristic", "random", "heuristic"]
    assert calls == [2, 3]
    assert [len(s) for _, s in out] == [2, 2, 3]


def test_hybrid_init_degenerate_cases():
    inst = benchmark_instance("10_C_R_4.29", 0)
    rng = np.random.default_rng(0)
    calls = []

    def heuristic(m):
        calls.append(m)
        return random_solution(inst, m, rng)

    assert all(o == "heuristic" for o, _ in hybrid_init(inst, [6, 7, 8], rng, heuristic))
    calls.clear()
    hybrid_init(inst, [6] * 5, rng, heuristic)
    assert calls == [6]


def test_hybrid_init_default_heuristic_valid():
    inst = benchmark_instance("5_C_CL_2.86", 0)
    out = hybrid_init(inst, [4, 4, 5], np.random.default_rng(0))
    assert all(is_permutation_matrix(s, 5) for _, s in out)


def test_config_validation():
    with pytest.raises(ValueError):
        HeuristicConfig(weights=(0.5, 0.2))
    with pytest.raises(ValueError):
        HeuristicConfig(weights=(0.0, 1.5))
    assert len(HeuristicConfig().weights) == 11
