"""Variation operators on permutation matrices."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .simulator import Evaluation, SolutionMatrix

Row = tuple[int, ...]


def canonical_sort(solution: Sequence[Row], evaluation: Evaluation) -> SolutionMatrix:
    """Order rows by (invalid element count, row content).

    Robots are interchangeable, so this removes part of the encoding
    redundancy before rows of two parents are paired up.
    """
    keyed = sorted(zip(evaluation.invalid_counts, (tuple(r) for r in solution)))
    return tuple(row for _, row in keyed)


def _pmx_child(donor: Row, filler: Row, a: int, b: int) -> Row:
    child = [0] * len(donor)
    child[a:b + 1] = donor[a:b + 1]
    segment = set(donor[a:b + 1])
    pos_in_donor = {v: i for i, v in enumerate(donor)}
    for i in list(range(a)) + list(range(b + 1, len(donor))):
        v = filler[i]
        while v in segment:
            v = filler[pos_in_donor[v]]
        child[i] = v
    return tuple(child)


def pmx(parent1: Row, parent2: Row, rng: np.random.Generator | None = None,
        cuts: tuple[int, int] | None = None) -> tuple[Row, Row]:
    """Partially matched crossover.

    ``cuts`` are 0-based inclusive segment bounds; when omitted they are
    drawn uniformly. Child one carries the segment of ``parent1`` and the
    remaining genes of ``parent2`` (resolved through the segment mapping),
    child two the reverse.
    """
    n = len(parent1)
    if len(parent2) != n:
        raise ValueError("parents must have equal length")
    if n < 2:
        return tuple(parent1), tuple(parent2)
    if cuts is None:
        a, b = sorted(int(v) for v in rng.choice(n, size=2, replace=False))
    else:
        a, b = cuts
    p1, p2 = tuple(parent1), tuple(parent2)
    return _pmx_child(p1, p2, a, b), _pmx_child(p2, p1, a, b)


def swap_row(row: Row, i: int, j: int) -> Row:
    out = list(row)
    out[i], out[j] = out[j], out[i]
    return tuple(out)


def swap_mutation(solution: Sequence[Row], rng: np.random.Generator) -> SolutionMatrix:
    """Exchange two distinct, uniformly chosen positions in every row."""
    out = []
    for row in solution:
        if len(row) < 2:
            out.append(tuple(row))
            continue
        i, j = rng.choice(len(row), size=2, replace=False)
        out.append(swap_row(tuple(row), int(i), int(j)))
    return tuple(out)


def reproduce(
    xa: SolutionMatrix,
    ea: Evaluation,
    xb: SolutionMatrix,
    eb: Evaluation,
    rng: np.random.Generator,
    crossover_probability: float = 0.9,
    max_subset_children: int = 10,
) -> list[SolutionMatrix]:
    """Offspring of two evaluated parents.

    Crossover branch: rows of both parents are put in canonical order and
    paired. Parents with equal robot counts give two row-wise PMX children.
    Otherwise (``m_a < m_b``) the offspring are the two PMX children of the
    first ``m_a`` row pairs, up to ``max_subset_children`` subsets of
    ``m_a`` rows drawn from the larger child, and two children that swap
    the first ``m_a`` rows of the parents unchanged.

    Mutation branch: one swap per row of each parent.
    """
    if rng.random() >= crossover_probability:
        return [swap_mutation(xa, rng), swap_mutation(xb, rng)]

    sa, sb = canonical_sort(xa, ea), canonical_sort(xb, eb)
    if len(sa) > len(sb):
        sa, sb = sb, sa
    ma, mb = len(sa), len(sb)
    ya, yb = [], []
    for i in range(ma):
        ca, cb = pmx(sa[i], sb[i], rng)
        ya.append(ca)
        yb.append(cb)
    if ma == mb:
        return [tuple(ya), tuple(yb)]

    yb.extend(sb[ma:])
    children = [tuple(ya), tuple(yb)]
    for _ in range(min(math.comb(mb, ma), max_subset_children)):
        picks = sorted(int(i) for i in rng.choice(mb, size=ma, replace=False))
        children.append(tuple(yb[i] for i in picks))
    children.append(tuple(sb[:ma]))
    children.append(tuple(sa) + tuple(sb[ma:]))
    return children


def is_permutation_matrix(solution: Sequence[Sequence[int]], n_tasks: int) -> bool:
    expected = list(range(1, n_tasks + 1))
    return len(solution) >= 1 and all(sorted(row) == expected for row in solution)
