"""Per-dimension distance functions and element/subsequence distance vectors.

Every distance is symmetric, non-negative and zero on identical inputs. Each
registry entry pairs a scalar function (used for single comparisons and as a
test oracle) with a vectorized pairwise kernel working on numeric encodings
produced by :class:`Encoder`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .model import DimensionDescriptor, SchemaError, WEEKDAYS, parse_hhmm, parse_weekday

MINUTES_PER_DAY = 1440
EARTH_RADIUS_KM = 6371.0088

_WEEKEND = {"Sat", "Sun"}


def _minutes(value) -> int:
    if isinstance(value, (int, np.integer)):
        return int(value)
    return parse_hhmm(value)


def dist_nominal(a, b) -> float:
    return 0.0 if a == b else 1.0


def dist_time_minutes(a, b, circular: bool = False) -> float:
    """Absolute difference in minutes between two ``HH:MM`` times.

    Linear by default: 23:50 and 00:10 are 1420 minutes apart unless
    ``circular`` is set.
    """
    delta = abs(_minutes(a) - _minutes(b))
    if circular:
        delta = min(delta, MINUTES_PER_DAY - delta)
    return float(delta)


def dist_weekday(a, b) -> float:
    """0 when both days are weekdays or both are weekend days, else 1."""
    wa = parse_weekday(a) in _WEEKEND
    wb = parse_weekday(b) in _WEEKEND
    return 0.0 if wa == wb else 1.0


def dist_numeric_abs(a, b) -> float:
    return abs(float(a) - float(b))


def _haversine(a, b) -> float:
    lat1, lon1, lat2, lon2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def dist_latlon(a, b, metric: str = "euclidean") -> float:
    """Planar Euclidean distance on raw degrees (``metric="haversine"`` gives km)."""
    if metric == "haversine":
        return _haversine(a, b)
    return math.hypot(float(a[0]) - float(b[0]), float(a[1]) - float(b[1]))


# Pairwise kernels: a has shape (p, ...) and b shape (q, ...); result is (p, q).

def _pair_binary(a, b, params):
    return (a[:, None] != b[None, :]).astype(np.float64)


def _pair_minutes(a, b, params):
    delta = np.abs(a[:, None] - b[None, :])
    if params.get("circular"):
        delta = np.minimum(delta, MINUTES_PER_DAY - delta)
    return delta


def _pair_abs(a, b, params):
    return np.abs(a[:, None] - b[None, :])


def _pair_euclidean(a, b, params):
    if params.get("metric") == "haversine":
        lat1, lon1 = np.radians(a[:, 0])[:, None], np.radians(a[:, 1])[:, None]
        lat2, lon2 = np.radians(b[:, 0])[None, :], np.radians(b[:, 1])[None, :]
        h = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
        return 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


@dataclass(frozen=True)
class DistanceFunction:
    name: str
    scalar: Callable[..., float]
    pairwise: Callable[[np.ndarray, np.ndarray, dict], np.ndarray]
    param_names: tuple[str, ...] = ()

    def __call__(self, a, b, params: dict | None = None) -> float:
        kwargs = {k: v for k, v in (params or {}).items() if k in self.param_names}
        return self.scalar(a, b, **kwargs)


REGISTRY: dict[str, DistanceFunction] = {
    "binary": DistanceFunction("binary", dist_nominal, _pair_binary),
    "minutes": DistanceFunction("minutes", dist_time_minutes, _pair_minutes, ("circular",)),
    "weekday": DistanceFunction("weekday", dist_weekday, _pair_binary),
    "abs": DistanceFunction("abs", dist_numeric_abs, _pair_abs),
    "euclidean": DistanceFunction("euclidean", dist_latlon, _pair_euclidean, ("metric",)),
}


def get_distance(distance_id: str) -> DistanceFunction:
    try:
        return REGISTRY[distance_id]
    except KeyError:
        raise SchemaError(f"unknown distance {distance_id!r}; known: {', '.join(sorted(REGISTRY))}") from None


def elem_distance(e1: Sequence, e2: Sequence, schema: Sequence[DimensionDescriptor]) -> np.ndarray:
    """Distance vector between two elements, one entry per schema dimension."""
    if len(e1) != len(schema) or len(e2) != len(schema):
        raise SchemaError(
            f"element widths ({len(e1)}, {len(e2)}) do not match schema width {len(schema)}"
        )
    return np.array(
        [get_distance(d.distance_id)(a, b, d.params) for d, a, b in zip(schema, e1, e2)],
        dtype=np.float64,
    )


def subseq_distance(s: Sequence[Sequence], r: Sequence[Sequence], schema: Sequence[DimensionDescriptor]) -> np.ndarray:
    """Per-dimension sum of element distances between two equal-length slices."""
    if len(s) != len(r):
        raise ValueError(f"subsequence lengths differ: {len(s)} != {len(r)}")
    if not s:
        raise ValueError("subsequences must be non-empty")
    total = np.zeros(len(schema), dtype=np.float64)
    for a, b in zip(s, r):
        total += elem_distance(a, b, schema)
    return total


class Encoder:
    """Numeric encodings of dimension values for the pairwise kernels.

    Nominal values are interned to integer codes; one encoder must be shared
    by every array that is compared against another, so codes agree.
    """

    def __init__(self):
        self._vocab: dict[int, dict[Any, int]] = {}

    def encode(self, dim_index: int, descriptor: DimensionDescriptor, values: Sequence) -> np.ndarray:
        kind = descriptor.kind
        if descriptor.distance_id == "binary":
            vocab = self._vocab.setdefault(dim_index, {})
            return np.array([vocab.setdefault(v, len(vocab)) for v in values], dtype=np.float64)
        if kind == "latlon-composite":
            return np.array(values, dtype=np.float64).reshape(len(values), 2)
        if kind == "temporal-hhmm":
            return np.array([_minutes(v) for v in values], dtype=np.float64)
        if kind == "weekday":
            return np.array([parse_weekday(v) in _WEEKEND for v in values], dtype=np.float64)
        return np.array(values, dtype=np.float64)

    def encode_elements(self, schema, elements: Sequence[Sequence]) -> list[np.ndarray]:
        """One encoded column per dimension for a run of elements."""
        return [
            self.encode(k, d, [e[k] for e in elements])
            for k, d in enumerate(schema)
        ]


def pairwise(descriptor: DimensionDescriptor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of element distances between two encoded columns of one dimension."""
    return get_distance(descriptor.distance_id).pairwise(a, b, descriptor.params)


__all__ = [
    "WEEKDAYS",
    "REGISTRY",
    "Encoder",
    "DistanceFunction",
    "dist_latlon",
    "dist_nominal",
    "dist_numeric_abs",
    "dist_time_minutes",
    "dist_weekday",
    "elem_distance",
    "get_distance",
    "pairwise",
    "subseq_distance",
]
