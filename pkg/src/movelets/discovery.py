"""Movelet discovery over every window, start position and dimension combination."""

from __future__ import annotations

import itertools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .alignment import align_batch, fractional_rank
from .model import Dataset, MoveletError, validate_dataset
from .relevance import Relevance, relevance_batch
from .tensor import DistanceTensor, compute_element_distances, csd, encode_dataset

log = logging.getLogger(__name__)


@dataclass
class Candidate:
    """A scored window of one trajectory.

    ``start`` and ``end`` are 1-based and inclusive. ``alignments`` holds the
    best-alignment distance vector (over ``dims``) into every dataset
    trajectory, in dataset order.
    """

    tid: str
    label: str
    start: int
    end: int
    dims: tuple[int, ...]
    alignments: np.ndarray = field(repr=False)
    relevance: Relevance

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    @property
    def score(self) -> float:
        return self.relevance.score

    def overlaps(self, other: "Candidate") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass
class Movelet(Candidate):
    elements: list = field(default_factory=list)
    dim_names: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "tid": self.tid,
            "label": self.label,
            "start": self.start,
            "end": self.end,
            "dims": list(self.dim_names),
            "splits": {n: v for n, v in zip(self.dim_names, self.relevance.split_points)},
            "score": self.relevance.score,
            "elements": self.elements,
        }


def enumerate_combinations(d: int) -> list[tuple[int, ...]]:
    """Non-empty subsets of ``range(d)``, smallest first, then lexicographic."""
    if d < 1:
        raise ValueError("need at least one dimension")
    return [c for size in range(1, d + 1) for c in itertools.combinations(range(d), size)]


def _best_over_combinations(A: DistanceTensor, R: np.ndarray, is_target: np.ndarray, combos, prune: bool):
    """Best combination for every window start of ``A``.

    Returns per-start lists of (combo, alignments, relevance arrays row).
    A later combination replaces the current best only on a strictly higher
    score, so equal scores keep the smaller combination.
    """
    extents = A.extents
    nj = A.data.shape[1]
    best = [None] * nj
    for combo in combos:
        W = align_batch(R, A.data, combo, extents)  # (nj, n, |C|)
        sp, score, tc, ct, degen = relevance_batch(W, is_target, prune=prune)
        for j in range(nj):
            if best[j] is None or score[j] > best[j][2].score:
                rel = Relevance(tuple(float(v) for v in sp[j]), float(score[j]), int(tc[j]), int(ct[j]), bool(degen[j]))
                best[j] = (combo, W[j], rel)
    return best


def best_candidate_at(
    ds: Dataset,
    source: int,
    A: DistanceTensor,
    j: int,
    ranks: np.ndarray | None = None,
    prune: bool = False,
) -> Candidate:
    """Best-combination candidate for the window of length ``A.w`` at 0-based ``j``."""
    if not 0 <= j < A.data.shape[1]:
        raise IndexError(f"window start {j} outside 0..{A.data.shape[1] - 1}")
    sub = DistanceTensor(A.data[:, j : j + 1], A.w, A.lengths)
    R = fractional_rank(sub.data) if ranks is None else ranks[:, j : j + 1]
    T = ds.trajectories[source]
    is_target = np.array([t.label == T.label for t in ds.trajectories])
    combo, W, rel = _best_over_combinations(sub, R, is_target, enumerate_combinations(len(ds.schema)), prune)[0]
    return Candidate(T.tid, T.label, j + 1, j + A.w, combo, W, rel)


def trajectory_candidates(
    ds: Dataset,
    source: int,
    max_length: int | None = None,
    prune: bool = False,
    encoded=None,
) -> list[Candidate]:
    """Every (length, start) candidate of one trajectory, before self-similarity removal."""
    T = ds.trajectories[source]
    is_target = np.array([t.label == T.label for t in ds.trajectories])
    combos = enumerate_combinations(len(ds.schema))
    base = compute_element_distances(source, ds, encoded=encoded)
    top = len(T) if max_length is None else min(max_length, len(T))
    out: list[Candidate] = []
    A = base
    for w in range(1, top + 1):
        if w > 1:
            A = csd(A, base, w)  # previous A_{w-1} is dropped here
        R = fractional_rank(A.data, axis=-1)
        for j, (combo, W, rel) in enumerate(_best_over_combinations(A, R, is_target, combos, prune)):
            out.append(Candidate(T.tid, T.label, j + 1, j + w, combo, W, rel))
    return out


def sort_by_quality(candidates: Sequence[Candidate]) -> list[Candidate]:
    """Score descending, then shorter first, then earlier start."""
    return sorted(candidates, key=lambda c: (-c.score, c.length, c.start))


def remove_self_similar(candidates: Sequence[Candidate]) -> list[Candidate]:
    """Greedy sweep keeping candidates that overlap no already-kept one.

    ``candidates`` must already be in :func:`sort_by_quality` order.
    """
    kept: list[Candidate] = []
    for c in candidates:
        if not any(c.overlaps(k) for k in kept):
            kept.append(c)
    return kept


def _to_movelet(ds: Dataset, source: int, c: Candidate) -> Movelet:
    T = ds.trajectories[source]
    names = tuple(ds.schema[k].name for k in c.dims)
    elements = []
    for e in T.elements[c.start - 1 : c.end]:
        elements.append([list(e[k]) if isinstance(e[k], tuple) else e[k] for k in c.dims])
    return Movelet(c.tid, c.label, c.start, c.end, c.dims, c.alignments, c.relevance, elements, names)


@dataclass
class TrajectoryResult:
    index: int
    movelets: list[Movelet]
    candidates_evaluated: int


def discover_trajectory(ds: Dataset, source: int, max_length: int | None = None, prune: bool = False, encoded=None) -> TrajectoryResult:
    cands = trajectory_candidates(ds, source, max_length=max_length, prune=prune, encoded=encoded)
    kept = remove_self_similar(sort_by_quality(cands))
    movelets = [_to_movelet(ds, source, c) for c in kept]
    return TrajectoryResult(source, movelets, len(cands))


# Worker-process state, set once per process by the pool initializer.
_WORKER: dict = {}


def _init_worker(ds: Dataset, max_length, prune):
    _WORKER.update(ds=ds, max_length=max_length, prune=prune, encoded=encode_dataset(ds))


def _work(source: int) -> TrajectoryResult:
    w = _WORKER
    return discover_trajectory(w["ds"], source, w["max_length"], w["prune"], w["encoded"])


@dataclass
class DiscoveryResult:
    movelets: list[Movelet]
    candidates_per_trajectory: dict[str, int]

    def to_json(self) -> list[dict]:
        return [m.to_json() for m in self.movelets]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, allow_nan=True) + "\n"


def discover(
    ds: Dataset,
    max_length: int | None = None,
    threads: int | None = 1,
    prune: bool = False,
) -> DiscoveryResult:
    """Run discovery over every trajectory of ``ds``.

    ``threads`` bounds the worker-process pool (``None`` uses every CPU). The
    result is ordered by trajectory, score descending, then start, and does
    not depend on the worker count.
    """
    report = validate_dataset(ds)
    if not report.ok:
        raise MoveletError("dataset is not discovery-ready: " + "; ".join(report.violations))
    if max_length is not None and max_length < 1:
        raise MoveletError("max_length must be >= 1")
    workers = threads or os.cpu_count() or 1
    sources = range(len(ds))
    if workers <= 1:
        encoded = encode_dataset(ds)
        results = [discover_trajectory(ds, s, max_length, prune, encoded) for s in sources]
    else:
        chunk = max(1, math.ceil(len(ds) / (workers * 4)))
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(ds, max_length, prune)) as pool:
            results = list(pool.map(_work, sources, chunksize=chunk))
    results.sort(key=lambda r: r.index)
    movelets = []
    counts = {}
    for r in results:
        movelets.extend(sorted(r.movelets, key=lambda m: (-m.score, m.start)))
        counts[ds.trajectories[r.index].tid] = r.candidates_evaluated
    log.info("discovered %d movelets from %d candidates", len(movelets), sum(counts.values()))
    return DiscoveryResult(movelets, counts)


def load_movelets(path) -> list[dict]:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise MoveletError(f"{path}: movelet file must hold a JSON array")
    for i, m in enumerate(doc):
        missing = {"tid", "start", "end", "dims", "splits", "score", "elements"} - set(m)
        if missing:
            raise MoveletError(f"{path}: movelet {i} lacks {', '.join(sorted(missing))}")
    return doc
