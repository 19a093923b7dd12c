"""Quality indicators and significance testing for bi-objective fronts.

Objectives are first mapped to a common scale: the makespan on a log scale
spanning ``[1e2, 1e6]`` and the robot count on ``[LBM, UBM]``. Indicators
clamp normalised values to ``[0, 1.1]`` so that penalised or out-of-band
points land on the reference boundary instead of distorting the result.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .core import ObjectiveVector, RobotBounds, dominates

CLAMP_MAX = 1.1
HV_REFERENCE = (1.1, 1.1)
_LOG_LO = 2.0 * math.log(10.0)
_LOG_HI = 6.0 * math.log(10.0)
EXACT_LIMIT = 12


class NormalizedPoint(NamedTuple):
    ob1: float
    ob2: float


def normalize(objectives: ObjectiveVector, bounds: RobotBounds) -> NormalizedPoint:
    makespan, m = objectives
    if not makespan > 0:
        raise ValueError(f"makespan must be positive to normalise, got {makespan}")
    ob1 = (math.log(makespan) - _LOG_LO) / (_LOG_HI - _LOG_LO)
    span = bounds.ubm - bounds.lbm
    ob2 = 0.0 if span == 0 else (m - bounds.lbm) / span
    return NormalizedPoint(ob1, ob2)


def clamp(point: Sequence[float], upper: float = CLAMP_MAX) -> NormalizedPoint:
    return NormalizedPoint(*(min(max(float(v), 0.0), upper) for v in point))


def normalize_front(front: Iterable[ObjectiveVector], bounds: RobotBounds,
                    clamped: bool = True) -> list[NormalizedPoint]:
    pts = [normalize(o, bounds) for o in front]
    return [clamp(p) for p in pts] if clamped else pts


def nondominated(points: Iterable[Sequence[float]]) -> list[tuple[float, ...]]:
    """Distinct non-dominated points, sorted lexicographically."""
    uniq = sorted({tuple(float(v) for v in p) for p in points})
    return [p for p in uniq if not any(dominates(q, p) for q in uniq)]


def reference_front(archives: Sequence[Iterable[Sequence[float]]]) -> list[tuple[float, ...]]:
    """Non-dominated union of several fronts."""
    merged = [p for a in archives for p in a]
    if not merged:
        raise ValueError("reference front needs at least one non-empty point set")
    return nondominated(merged)


def igd(reference: Sequence[Sequence[float]], front: Sequence[Sequence[float]]) -> float:
    """Mean distance from each reference point to its nearest front point."""
    if len(reference) == 0:
        raise ValueError("reference set is empty")
    if len(front) == 0:
        return math.inf
    ref = np.asarray(reference, dtype=float)
    pts = np.asarray(front, dtype=float)
    d = np.sqrt(((ref[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
    return float(d.min(axis=1).mean())


def hv(front: Iterable[Sequence[float]], reference_point: Sequence[float] = HV_REFERENCE) -> float:
    """Exact two-dimensional hypervolume (minimisation) by a sweep along ob1."""
    rx, ry = reference_point
    pts = sorted((float(x), float(y)) for x, y in front if x <= rx and y <= ry)
    area, prev_y = 0.0, ry
    for x, y in pts:
        if y < prev_y:
            area += (rx - x) * (prev_y - y)
            prev_y = y
    return area


def midranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties given the average of their positions."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(len(v))
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_rank_sum(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Two-sided Wilcoxon rank-sum p-value.

    Small problems (combined size at most 12) use the exact permutation
    distribution of the rank sum, computed on mid-ranks so ties are handled
    exactly. Larger ones use the normal approximation with tie-corrected
    variance and a continuity correction.
    """
    na, nb = len(sample_a), len(sample_b)
    if na < 3 or nb < 3:
        raise ValueError(f"both samples need at least 3 values, got {na} and {nb}")
    n = na + nb
    ranks = midranks([*sample_a, *sample_b])
    w = ranks[:na].sum()
    mean = na * (n + 1) / 2.0
    dev = abs(w - mean)

    if n <= EXACT_LIMIT:
        tol = 1e-9
        total = extreme = 0
        for idx in itertools.combinations(range(n), na):
            total += 1
            if abs(ranks[list(idx)].sum() - mean) >= dev - tol:
                extreme += 1
        return min(1.0, extreme / total)

    _, counts = np.unique(ranks, return_counts=True)
    tie = float((counts**3 - counts).sum())
    var = na * nb / 12.0 * ((n + 1) - tie / (n * (n - 1)))
    if var <= 0:
        return 1.0
    z = (dev - 0.5) / math.sqrt(var)
    if z <= 0:
        return 1.0
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def bonferroni(p_values: Sequence[float], n_comparisons: int | None = None) -> list[float]:
    k = len(p_values) if n_comparisons is None else n_comparisons
    if k < 1:
        return []
    return [min(1.0, p * k) for p in p_values]
