"""Split points and relevance score over a multidimensional orderline.

Each trajectory contributes one point: its best-alignment distance vector for
a candidate window. Split points are taken from points of the opposite
classes. A point is *covered* by split points ``sp`` when it is strictly below
``sp`` on every dimension, and the candidate's score is the F-measure of
covering the target class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np


@dataclass(frozen=True)
class OrderPoint:
    distances: tuple[float, ...]
    label: Hashable
    index: int = -1


@dataclass(frozen=True)
class Relevance:
    split_points: tuple[float, ...]
    score: float
    covered_target: int
    covered_total: int
    degenerate: bool = False


def fscore(covered_target: int, covered_total: int, target_total: int) -> float:
    """Harmonic mean of coverage precision and recall."""
    if target_total < 1:
        raise ValueError("target_total must be >= 1")
    precision = covered_target / covered_total if covered_total else 0.0
    recall = covered_target / target_total
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _as_array(points) -> np.ndarray:
    if len(points) and isinstance(points[0], OrderPoint):
        points = [p.distances for p in points]
    arr = np.asarray(points, dtype=np.float64)
    return arr.reshape(len(arr), -1) if arr.size else arr.reshape(len(points), 0)


def dominated_mask(points: np.ndarray) -> np.ndarray:
    """True where another point is strictly smaller on every dimension, or an
    earlier point is an exact duplicate."""
    pts = np.asarray(points, dtype=np.float64)
    below = np.all(pts[None, :, :] < pts[:, None, :], axis=-1)  # [p, q]: q < p
    same = np.all(pts[None, :, :] == pts[:, None, :], axis=-1)
    earlier_dupe = np.tril(same, k=-1).any(axis=1)
    return below.any(axis=1) | earlier_dupe


def prune_dominated(points: Sequence) -> list[int]:
    """Indices of the points left after dominance pruning (first duplicate kept)."""
    pts = _as_array(points)
    if len(pts) == 0:
        return []
    return [int(i) for i in np.flatnonzero(~dominated_mask(pts))]


def coverage(sp: Sequence[float], points: Sequence) -> list[int]:
    """Indices of points strictly below ``sp`` on every dimension."""
    pts = _as_array(points)
    if len(pts) == 0:
        return []
    sp = np.asarray(sp, dtype=np.float64)
    return [int(i) for i in np.flatnonzero(np.all(pts < sp, axis=1))]


def relevance_batch(points: np.ndarray, is_target: np.ndarray, prune: bool = False):
    """Best split points for a batch of orderlines sharing the same labels.

    ``points`` is ``(B, n, c)``; ``is_target`` is a boolean ``(n,)``. Every
    finite opposite-class point is a candidate unless ``prune`` restricts the
    candidates to the non-dominated ones. Returns arrays
    ``(split_points (B, c), score (B,), covered_target (B,), covered_total (B,),
    degenerate (B,))``.
    """
    points = np.asarray(points, dtype=np.float64)
    is_target = np.asarray(is_target, dtype=bool)
    B, n, c = points.shape
    target_total = int(is_target.sum())
    if target_total < 1:
        raise ValueError("orderline has no target-class point")

    finite = np.all(np.isfinite(points), axis=2)  # (B, n)
    candidate = finite & ~is_target[None, :]
    if prune:
        for b in range(B):
            idx = np.flatnonzero(candidate[b])
            if len(idx) > 1:
                candidate[b, idx[dominated_mask(points[b, idx])]] = False

    # cov[b, a, p]: point p covered when candidate a's vector is the split
    cov = np.all(points[:, None, :, :] < points[:, :, None, :], axis=3)
    covered_total = cov.sum(axis=2)
    covered_target = (cov & is_target[None, None, :]).sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(covered_total > 0, covered_target / np.maximum(covered_total, 1), 0.0)
        recall = covered_target / target_total
        denom = precision + recall
        score = np.where(denom > 0, 2 * precision * recall / np.where(denom > 0, denom, 1.0), 0.0)
    score = np.where(candidate, score, -1.0)

    sp = np.full((B, c), np.inf)
    best_score = np.zeros(B)
    best_tc = np.zeros(B, dtype=np.int64)
    best_ct = np.zeros(B, dtype=np.int64)
    degenerate = ~candidate.any(axis=1)
    for b in np.flatnonzero(~degenerate):
        top = score[b].max()
        pool = np.flatnonzero(score[b] == top)
        if len(pool) > 1:
            tc = covered_target[b, pool]
            pool = pool[tc == tc.max()]
        if len(pool) > 1:
            vecs = points[b, pool]
            pool = pool[np.lexsort(vecs.T[::-1])[:1]]
        a = pool[0]
        sp[b] = points[b, a]
        best_score[b] = score[b, a]
        best_tc[b] = covered_target[b, a]
        best_ct[b] = covered_total[b, a]
    return sp, best_score, best_tc, best_ct, degenerate


def master_relevance(points: Sequence[OrderPoint], target: Hashable, prune: bool = False) -> Relevance:
    """Split points maximizing the F-measure of covering ``target`` points.

    Ties go to more covered target points, then to the lexicographically
    smaller split vector. With no usable opposite-class point the result is
    flagged degenerate: all-``inf`` split points and score 0.
    """
    arr = _as_array(points)
    is_target = np.array([p.label == target for p in points], dtype=bool)
    sp, score, tc, ct, degenerate = relevance_batch(arr[None], is_target, prune=prune)
    return Relevance(
        split_points=tuple(float(v) for v in sp[0]),
        score=float(score[0]),
        covered_target=int(tc[0]),
        covered_total=int(ct[0]),
        degenerate=bool(degenerate[0]),
    )
