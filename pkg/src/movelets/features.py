"""Movelet feature matrices and a small nearest-neighbour classifier."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .alignment import align_rows
from .distance import Encoder, pairwise
from .model import Dataset, MoveletError, SchemaError

INF_CAP = 1e12  # stands in for +inf in raw-mode Euclidean kNN distances


@dataclass
class FeatureMatrix:
    tids: list[str]
    labels: list[str]
    columns: list[str]
    values: np.ndarray  # (rows, columns)
    mode: str = "binary"

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tid", "label", *self.columns])
            for tid, label, row in zip(self.tids, self.labels, self.values):
                if self.mode == "binary":
                    cells = [str(int(v)) for v in row]
                else:
                    cells = [repr(float(v)) for v in row]
                writer.writerow([tid, label, *cells])

    @classmethod
    def read_csv(cls, path: str | Path) -> "FeatureMatrix":
        with Path(path).open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[:2] != ["tid", "label"]:
                raise MoveletError(f"{path}: feature file must start with columns tid,label")
            tids, labels, rows = [], [], []
            for row in reader:
                if not row:
                    continue
                if len(row) != len(header):
                    raise MoveletError(f"{path}:{reader.line_num}: expected {len(header)} fields")
                tids.append(row[0])
                labels.append(row[1])
                try:
                    rows.append([float(v) for v in row[2:]])
                except ValueError as exc:
                    raise MoveletError(f"{path}:{reader.line_num}: {exc}") from None
        values = np.array(rows, dtype=np.float64).reshape(len(rows), len(header) - 2)
        binary = bool(np.isin(values, (0.0, 1.0)).all()) and all("." not in c for c in header[2:])
        return cls(tids, labels, header[2:], values, "binary" if binary else "raw")


def _window_sums(dist: np.ndarray) -> np.ndarray:
    """Sum ``dist[t, k + t]`` over t for every start k; ``dist`` is (w, L)."""
    w, L = dist.shape
    nk = L - w + 1
    if nk <= 0:
        return np.empty(0)
    total = dist[0, :nk].copy()
    for t in range(1, w):
        total += dist[t, t : t + nk]
    return total


def _movelet_dims(ds: Dataset, movelet: dict) -> list[int]:
    try:
        return [ds.schema.index(name) for name in movelet["dims"]]
    except SchemaError as exc:
        raise SchemaError(f"movelet from {movelet.get('tid')!r}: {exc}") from None


def _elements_to_values(ds: Dataset, dims: list[int], movelet: dict) -> list[list]:
    cols = []
    for pos, k in enumerate(dims):
        desc = ds.schema[k]
        values = [row[pos] for row in movelet["elements"]]
        if desc.kind == "latlon-composite":
            values = [tuple(v) for v in values]
        cols.append(values)
    return cols


def alignment_vectors(ds: Dataset, movelets: Sequence[dict]) -> list[np.ndarray]:
    """For every movelet, the ``(rows, |C|)`` best-alignment distances into ``ds``."""
    encoder = Encoder()
    encoded = [encoder.encode_elements(ds.schema, t.elements) for t in ds.trajectories]
    out = []
    for m in movelets:
        dims = _movelet_dims(ds, m)
        raw = _elements_to_values(ds, dims, m)
        pattern = [encoder.encode(k, ds.schema[k], raw[p]) for p, k in enumerate(dims)]
        vecs = np.empty((len(ds), len(dims)))
        for i, cols in enumerate(encoded):
            rows = np.array([_window_sums(pairwise(ds.schema[k], pattern[p], cols[k])) for p, k in enumerate(dims)])
            vecs[i] = align_rows(rows.reshape(len(dims), -1)).distances
        out.append(vecs)
    return out


def transform(ds: Dataset, movelets: Sequence[dict], mode: str = "binary") -> FeatureMatrix:
    """Represent every trajectory of ``ds`` by its relation to each movelet.

    ``binary`` gives 1 when the trajectory's best alignment is strictly below
    the movelet's split points on every dimension; ``raw`` gives the aligned
    distances themselves, one column per movelet dimension (``inf`` when the
    trajectory is shorter than the movelet).
    """
    if mode not in ("binary", "raw"):
        raise ValueError(f"unknown feature mode {mode!r}")
    vectors = alignment_vectors(ds, movelets)
    columns: list[str] = []
    blocks = []
    for idx, (m, vecs) in enumerate(zip(movelets, vectors)):
        if mode == "binary":
            sp = np.array([m["splits"][name] for name in m["dims"]], dtype=np.float64)
            blocks.append(np.all(vecs < sp, axis=1).astype(np.float64)[:, None])
            columns.append(f"m{idx}")
        else:
            blocks.append(vecs)
            columns.extend(f"m{idx}.{name}" for name in m["dims"])
    values = np.hstack(blocks) if blocks else np.zeros((len(ds), 0))
    return FeatureMatrix(
        [t.tid for t in ds.trajectories],
        [t.label for t in ds.trajectories],
        columns,
        values,
        mode,
    )


@dataclass
class Classification:
    predicted: list[str]
    accuracy: float
    per_class: dict[str, float]


def knn_classify(train: FeatureMatrix, test: FeatureMatrix, k: int = 1) -> Classification:
    """Majority vote of the ``k`` nearest training rows.

    Hamming distance for binary matrices, Euclidean (with ``inf`` capped at
    ``INF_CAP``) for raw ones. Neighbours at equal distance keep training-row
    order; vote ties go to the lexicographically smallest label.
    """
    if train.columns != test.columns:
        raise MoveletError("train and test feature columns differ")
    if not 1 <= k <= len(train.labels):
        raise ValueError(f"k must be in 1..{len(train.labels)}, got {k}")
    a = np.minimum(train.values, INF_CAP)
    b = np.minimum(test.values, INF_CAP)
    if train.mode == "binary" and test.mode == "binary":
        dist = (b[:, None, :] != a[None, :, :]).sum(axis=2).astype(np.float64)
    else:
        dist = np.sqrt(((b[:, None, :] - a[None, :, :]) ** 2).sum(axis=2))
    predicted = []
    for row in dist:
        nearest = np.argsort(row, kind="stable")[:k]
        votes = Counter(train.labels[i] for i in nearest)
        top = max(votes.values())
        predicted.append(min(label for label, n in votes.items() if n == top))
    hits = [p == t for p, t in zip(predicted, test.labels)]
    accuracy = sum(hits) / len(hits) if hits else math.nan
    per_class = {}
    for label in sorted(set(test.labels)):
        rows = [h for h, t in zip(hits, test.labels) if t == label]
        per_class[label] = sum(rows) / len(rows)
    return Classification(predicted, accuracy, per_class)
