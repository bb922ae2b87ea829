"""Best alignment of a window into a trajectory by average per-dimension rank.

Distances on different dimensions live on unrelated scales (minutes, mismatch
counts, degrees). Instead of normalizing them, each dimension's distances over
all candidate start positions are turned into fractional ranks, and the start
position with the lowest mean rank wins. Ties go to the earliest position.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


def fractional_rank(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Ascending 1-based ranks along ``axis``; tied values share their mean rank.

    Works on any array shape. ``+inf`` entries rank last and tie among
    themselves.
    """
    x = np.moveaxis(np.asarray(values, dtype=np.float64), axis, -1)
    n = x.shape[-1]
    if n == 0:
        return np.moveaxis(np.empty_like(x), -1, axis)
    order = np.argsort(x, axis=-1, kind="stable")
    xs = np.take_along_axis(x, order, axis=-1)
    idx = np.broadcast_to(np.arange(n), xs.shape)
    starts_group = np.ones(xs.shape, dtype=bool)
    starts_group[..., 1:] = xs[..., 1:] != xs[..., :-1]
    ends_group = np.ones(xs.shape, dtype=bool)
    ends_group[..., :-1] = starts_group[..., 1:]
    first = np.maximum.accumulate(np.where(starts_group, idx, 0), axis=-1)
    last = np.flip(
        np.minimum.accumulate(np.flip(np.where(ends_group, idx, n - 1), axis=-1), axis=-1),
        axis=-1,
    )
    sorted_ranks = (first + last) / 2.0 + 1.0
    ranks = np.empty_like(sorted_ranks)
    np.put_along_axis(ranks, order, sorted_ranks, axis=-1)
    return np.moveaxis(ranks, -1, axis)


def rank_row(values: Sequence[float]) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("rank_row needs a non-empty 1-D sequence")
    return fractional_rank(values)


@dataclass(frozen=True)
class Alignment:
    position: int  # 0-based start in the target trajectory, -1 for the sentinel
    distances: tuple[float, ...]
    average_rank: float

    @property
    def is_sentinel(self) -> bool:
        return self.position < 0


def sentinel_alignment(n_dims: int) -> Alignment:
    return Alignment(-1, (float("inf"),) * n_dims, float("inf"))


def master_alignment(ranks: Sequence[Sequence[float]], dists: Sequence[Sequence[float]]) -> Alignment:
    """Pick the start position with the lowest mean rank across dimensions.

    ``ranks`` and ``dists`` are ``(|C|, n)``: one row per dimension in the
    combination, one column per start position. An empty position axis
    (trajectory shorter than the window) yields the all-``inf`` sentinel.
    """
    ranks = np.asarray(ranks, dtype=np.float64)
    dists = np.asarray(dists, dtype=np.float64)
    if ranks.ndim != 2 or ranks.shape[0] == 0:
        raise ValueError("master_alignment needs at least one dimension")
    if ranks.shape != dists.shape:
        raise ValueError(f"rank/distance shapes differ: {ranks.shape} vs {dists.shape}")
    if ranks.shape[1] == 0:
        return sentinel_alignment(ranks.shape[0])
    total = ranks.sum(axis=0)
    pos = int(np.argmin(total))
    return Alignment(pos, tuple(float(v) for v in dists[:, pos]), float(total[pos] / ranks.shape[0]))


def align_rows(dist_rows: Sequence[Sequence[float]]) -> Alignment:
    """Rank each distance row and run :func:`master_alignment` on the result."""
    dist_rows = np.asarray(dist_rows, dtype=np.float64)
    if dist_rows.shape[-1] == 0:
        return sentinel_alignment(dist_rows.shape[0])
    return master_alignment(fractional_rank(dist_rows), dist_rows)


def align_batch(
    ranks: np.ndarray,
    dists: np.ndarray,
    dims: Sequence[int],
    extents: np.ndarray,
) -> np.ndarray:
    """Vectorized :func:`master_alignment` over trajectories and window starts.

    ``ranks`` and ``dists`` are ``(n, J, D, K)`` tensors (see
    :mod:`movelets.tensor`); ``extents[i]`` is the number of valid ``k`` for
    trajectory ``i``. Returns the aligned distance vectors, shape ``(J, n, |C|)``,
    with ``inf`` rows for trajectories that have no valid start.
    """
    dims = list(dims)
    # padded cells rank after every valid one, so argmin never lands on them
    total = ranks[:, :, dims, :].sum(axis=2)  # (n, J, K)
    pos = np.argmin(total, axis=2)  # (n, J)
    picked = np.take_along_axis(dists[:, :, dims, :], pos[:, :, None, None], axis=3)[..., 0]
    picked = np.where((extents > 0)[:, None, None], picked, np.inf)
    return np.ascontiguousarray(np.swapaxes(picked, 0, 1))
