import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mompda.core import Instance, ObjectiveVector, RobotBounds, build_travel_times, dominates, robot_bounds
from mompda.simulator import decode

from oracles import small_instance


def make(rates, beta, positions=None):
    n = len(rates)
    positions = positions or tuple((0.1 * (j % 10), 0.5) for j in range(n))
    return Instance("t", (0.0, 0.0), positions, (1.0,) * n, tuple(rates), beta)


def test_travel_time_zero_diagonal_and_345():
    inst = make([0.1], 1.0, ((0.3, 0.4),))
    tt = build_travel_times(inst)
    assert tt(0, 0) == 0.0 and tt(1, 1) == 0.0
    assert tt(0, 1) == pytest.approx(0.5, abs=1e-15)


def test_travel_time_scales_with_speed():
    inst = Instance("t", (0.0, 0.0), ((0.3, 0.4),), (1.0,), (0.1,), 1.0, robot_speed=2.0)
    assert build_travel_times(inst)(0, 1) == pytest.approx(0.25)


def test_travel_matrix_is_read_only():
    tt = build_travel_times(make([0.1], 1.0))
    with pytest.raises(ValueError):
        tt.times[0, 1] = 3.0


@given(st.integers(0, 2**32 - 1))
def test_travel_symmetric_and_triangle(seed):
    inst = small_instance(np.random.default_rng(seed), max_tasks=6)
    t = build_travel_times(inst).times
    assert np.array_equal(t, t.T)
    n = len(t)
    for i in range(n):
        for j in range(n):
            assert np.all(t[i, j] <= t[i, :] + t[:, j] + 1e-12)


@given(st.integers(0, 2**32 - 1))
def test_travel_invariant_under_relabelling(seed):
    rng = np.random.default_rng(seed)
    inst = small_instance(rng, max_tasks=6)
    perm = rng.permutation(inst.n_tasks)
    relabelled = Instance("p", inst.depot_position, tuple(inst.task_positions[i] for i in perm),
                          tuple(inst.initial_demands[i] for i in perm),
                          tuple(inst.increment_rates[i] for i in perm), inst.robot_ability)
    a = build_travel_times(inst).times
    b = build_travel_times(relabelled).times
    idx = np.concatenate([[0], perm + 1])
    assert np.array_equal(b, a[np.ix_(idx, idx)])


def test_robot_bounds_single_task():
    assert robot_bounds(make([0.05], 0.065)) == RobotBounds(1, 2)


def test_robot_bounds_three_tasks():
    assert robot_bounds(make([0.1, 0.15, 0.2], 0.035)) == RobotBounds(6, 15)


def test_robot_bounds_rates_equal_ability():
    assert robot_bounds(make([0.5] * 4, 0.5)) == RobotBounds(1, 5)


@given(st.floats(0.01, 5.0), st.floats(0.01, 1.0))
def test_lbm_robots_finish_a_single_task(alpha, beta):
    inst = Instance("s", (0.0, 0.0), ((0.6, 0.8),), (1.0,), (alpha,), beta)
    lbm = robot_bounds(inst).lbm
    ev = decode(inst, build_travel_times(inst), [[1]] * lbm)
    assert ev.feasible == (alpha < lbm * beta)
    if alpha < lbm * beta:
        assert math.isfinite(ev.makespan)


@pytest.mark.parametrize("a,b,expected", [
    ((10, 2), (12, 3), True),
    ((10, 3), (12, 2), False),
    ((10, 2), (10, 2), False),
])
def test_dominates_examples(a, b, expected):
    assert dominates(ObjectiveVector(*a), ObjectiveVector(*b)) is expected


vec = st.tuples(st.integers(0, 5), st.integers(0, 5))


@given(vec, vec, vec)
def test_dominance_is_strict_partial_order(a, b, c):
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


@pytest.mark.parametrize("kwargs", [
    dict(task_positions=()),
    dict(robot_ability=0.0),
    dict(robot_speed=-1.0),
    dict(initial_demands=(-1.0,)),
    dict(increment_rates=(0.0,)),
    dict(task_positions=((1.5, 0.2),)),
    dict(initial_demands=(1.0, 2.0)),
])
def test_instance_validation(kwargs):
    base = dict(name="x", depot_position=(0.0, 0.0), task_positions=((0.5, 0.5),),
                initial_demands=(1.0,), increment_rates=(0.1,), robot_ability=1.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        Instance(**base)


def test_zero_rate_needs_flag():
    inst = Instance("x", (0.0, 0.0), ((0.5, 0.5),), (1.0,), (0.0,), 1.0, allow_zero_rates=True)
    assert inst.increment_rates == (0.0,)
