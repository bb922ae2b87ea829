"""Trajectory data model and CSV/JSON ingestion.

A dataset file is a CSV with one row per trajectory element. Three mandatory
columns identify the element (``tid``, ``label``, ``order``); every declared
dimension maps to one column, except ``latlon-composite`` which maps to two.
The schema is a JSON document::

    {"dimensions": [{"name": "time", "kind": "temporal-hhmm", "distance": "minutes"}]}
"""

from __future__ import annotations

import csv
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

KINDS = ("nominal", "numeric", "temporal-hhmm", "weekday", "latlon-composite")

DEFAULT_DISTANCE = {
    "nominal": "binary",
    "numeric": "abs",
    "temporal-hhmm": "minutes",
    "weekday": "weekday",
    "latlon-composite": "euclidean",
}

COMPATIBLE_DISTANCES = {
    "nominal": {"binary"},
    "numeric": {"abs", "binary"},
    "temporal-hhmm": {"minutes"},
    "weekday": {"weekday", "binary"},
    "latlon-composite": {"euclidean"},
}

WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

_HHMM = re.compile(r"^(\d{1,2}):(\d{2})$")


class MoveletError(ValueError):
    """Base class for user-facing input errors."""


class SchemaError(MoveletError):
    pass


class DataError(MoveletError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where = f"{where}{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


def parse_hhmm(value: str) -> int:
    """Minutes since midnight for an ``HH:MM`` string."""
    m = _HHMM.match(str(value).strip())
    if not m:
        raise ValueError(f"malformed time {value!r}, expected HH:MM")
    hours, minutes = int(m.group(1)), int(m.group(2))
    if hours > 23 or minutes > 59:
        raise ValueError(f"time out of range {value!r}")
    return hours * 60 + minutes


def parse_weekday(value: str) -> str:
    token = str(value).strip()
    if token not in WEEKDAYS:
        raise ValueError(f"unknown weekday {value!r}, expected one of {', '.join(WEEKDAYS)}")
    return token


@dataclass(frozen=True)
class DimensionDescriptor:
    """One dimension of the element schema.

    ``columns`` names the CSV column(s) the dimension is read from; it defaults
    to ``(name,)`` and, for ``latlon-composite``, to ``(name_lat, name_lon)``.
    """

    name: str
    kind: str
    distance_id: str = ""
    params: dict = field(default_factory=dict, hash=False, compare=True)
    columns: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"dimension {self.name!r}: unknown kind {self.kind!r}")
        if not self.distance_id:
            object.__setattr__(self, "distance_id", DEFAULT_DISTANCE[self.kind])
        if self.distance_id not in COMPATIBLE_DISTANCES[self.kind]:
            raise SchemaError(
                f"dimension {self.name!r}: distance {self.distance_id!r} "
                f"is not compatible with kind {self.kind!r}"
            )
        if not self.columns:
            if self.kind == "latlon-composite":
                cols = (f"{self.name}_lat", f"{self.name}_lon")
            else:
                cols = (self.name,)
            object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "columns", tuple(self.columns))
        expected = 2 if self.kind == "latlon-composite" else 1
        if len(self.columns) != expected:
            raise SchemaError(
                f"dimension {self.name!r}: kind {self.kind!r} needs {expected} column(s), "
                f"got {len(self.columns)}"
            )

    def parse(self, raw: Sequence[str]) -> Any:
        """Convert the raw CSV cell(s) for this dimension into an element value."""
        if self.kind == "nominal":
            return raw[0]
        if self.kind == "numeric":
            x = float(raw[0])
            if not math.isfinite(x):
                raise ValueError(f"non-finite number {raw[0]!r}")
            return x
        if self.kind == "temporal-hhmm":
            parse_hhmm(raw[0])
            return raw[0].strip()
        if self.kind == "weekday":
            return parse_weekday(raw[0])
        lat, lon = float(raw[0]), float(raw[1])
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise ValueError(f"non-finite coordinate ({raw[0]!r}, {raw[1]!r})")
        return (lat, lon)

    def format(self, value: Any) -> list[str]:
        if self.kind == "latlon-composite":
            return [repr(float(value[0])), repr(float(value[1]))]
        if self.kind == "numeric":
            return [repr(float(value))]
        return [str(value)]

    def to_json(self) -> dict:
        doc = {"name": self.name, "kind": self.kind, "distance": self.distance_id}
        if self.params:
            doc["params"] = dict(self.params)
        doc["columns"] = list(self.columns)
        return doc


@dataclass(frozen=True)
class Schema:
    dimensions: tuple[DimensionDescriptor, ...]
    tid_column: str = "tid"
    label_column: str = "label"
    order_column: str = "order"

    def __post_init__(self):
        if not self.dimensions:
            raise SchemaError("schema declares no dimensions")
        names = [d.name for d in self.dimensions]
        dupes = sorted(n for n, c in Counter(names).items() if c > 1)
        if dupes:
            raise SchemaError(f"duplicate dimension name(s): {', '.join(dupes)}")

    def __len__(self) -> int:
        return len(self.dimensions)

    def __iter__(self):
        return iter(self.dimensions)

    def __getitem__(self, i):
        return self.dimensions[i]

    @property
    def names(self) -> list[str]:
        return [d.name for d in self.dimensions]

    def index(self, name: str) -> int:
        for i, d in enumerate(self.dimensions):
            if d.name == name:
                return i
        raise SchemaError(f"unknown dimension {name!r}")

    @classmethod
    def from_json(cls, doc: dict) -> "Schema":
        if not isinstance(doc, dict) or not isinstance(doc.get("dimensions"), list):
            raise SchemaError('schema must be an object with a "dimensions" list')
        dims = []
        for entry in doc["dimensions"]:
            try:
                dims.append(
                    DimensionDescriptor(
                        name=entry["name"],
                        kind=entry["kind"],
                        distance_id=entry.get("distance", ""),
                        params=dict(entry.get("params", {})),
                        columns=tuple(entry.get("columns", ())),
                    )
                )
            except KeyError as exc:
                raise SchemaError(f"dimension entry {entry!r} lacks field {exc.args[0]!r}") from None
        return cls(
            tuple(dims),
            tid_column=doc.get("tid_column", "tid"),
            label_column=doc.get("label_column", "label"),
            order_column=doc.get("order_column", "order"),
        )

    def to_json(self) -> dict:
        doc: dict = {"dimensions": [d.to_json() for d in self.dimensions]}
        for key, default in (("tid_column", "tid"), ("label_column", "label"), ("order_column", "order")):
            value = getattr(self, key)
            if value != default:
                doc[key] = value
        return doc


def load_schema(path: str | Path) -> Schema:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    try:
        return Schema.from_json(doc)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None


# An element is a tuple of per-dimension values aligned with the schema.
Element = tuple


@dataclass(frozen=True)
class Trajectory:
    tid: str
    label: str
    elements: tuple[Element, ...]

    def __post_init__(self):
        if not self.elements:
            raise DataError(f"trajectory {self.tid!r} has no elements")

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    trajectories: tuple[Trajectory, ...]

    def __post_init__(self):
        width = len(self.schema)
        for t in self.trajectories:
            for e in t.elements:
                if len(e) != width:
                    raise DataError(
                        f"trajectory {t.tid!r}: element has {len(e)} values, schema has {width}"
                    )

    def __len__(self) -> int:
        return len(self.trajectories)

    @property
    def classes(self) -> list[str]:
        return sorted({t.label for t in self.trajectories})

    @property
    def labels(self) -> list[str]:
        return [t.label for t in self.trajectories]

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(self.schema, tuple(self.trajectories[i] for i in indices))


def _tid_key(tid: str):
    # numeric tids sort numerically so "10" follows "9"
    return (0, int(tid), "") if tid.isdigit() else (1, 0, tid)


def load_dataset(path: str | Path, schema: Schema | dict | str | Path) -> Dataset:
    """Read a trajectory CSV.

    Rows are grouped by tid and ordered by the integer order column, so the
    file's own row order is irrelevant. Raises :class:`SchemaError` for missing
    columns and :class:`DataError` (carrying the 1-based file line) for bad rows.
    """
    if isinstance(schema, dict):
        schema = Schema.from_json(schema)
    elif not isinstance(schema, Schema):
        schema = load_schema(schema)
    path = Path(path)
    if not path.exists():
        raise DataError("file not found", path=str(path))

    rows: dict[str, list[tuple[int, Element, int]]] = {}
    labels: dict[str, str] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError("empty file", path=str(path)) from None
        needed = [schema.tid_column, schema.label_column, schema.order_column]
        for d in schema:
            needed.extend(d.columns)
        missing = [c for c in needed if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        col = {name: header.index(name) for name in needed}

        seen: set[tuple[str, int]] = set()
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise DataError(f"expected {len(header)} fields, got {len(row)}", line, str(path))
            for name in needed:
                if not row[col[name]].strip():
                    raise DataError(f"missing value in column {name!r}", line, str(path))
            tid = row[col[schema.tid_column]].strip()
            label = row[col[schema.label_column]].strip()
            try:
                order = int(row[col[schema.order_column]])
            except ValueError:
                raise DataError(
                    f"order value {row[col[schema.order_column]]!r} is not an integer", line, str(path)
                ) from None
            if (tid, order) in seen:
                raise DataError(f"duplicate element (tid={tid!r}, order={order})", line, str(path))
            seen.add((tid, order))
            if labels.setdefault(tid, label) != label:
                raise DataError(
                    f"trajectory {tid!r} has conflicting labels {labels[tid]!r} and {label!r}",
                    line,
                    str(path),
                )
            values = []
            for d in schema:
                raw = [row[col[c]] for c in d.columns]
                try:
                    values.append(d.parse(raw))
                except ValueError as exc:
                    raise DataError(f"dimension {d.name!r}: {exc}", line, str(path)) from None
            rows.setdefault(tid, []).append((order, tuple(values), line))

    trajectories = []
    for tid in sorted(rows, key=_tid_key):
        elements = tuple(v for _, v, _ in sorted(rows[tid], key=lambda r: r[0]))
        trajectories.append(Trajectory(tid, labels[tid], elements))
    return Dataset(schema, tuple(trajectories))


def save_dataset(ds: Dataset, path: str | Path) -> None:
    """Write ``ds`` in the same CSV layout :func:`load_dataset` reads."""
    schema = ds.schema
    header = [schema.tid_column, schema.label_column, schema.order_column]
    for d in schema:
        header.extend(d.columns)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for t in ds.trajectories:
            for order, e in enumerate(t.elements, start=1):
                row = [t.tid, t.label, str(order)]
                for d, v in zip(schema, e):
                    row.extend(d.format(v))
                writer.writerow(row)


def save_schema(schema: Schema, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schema.to_json(), indent=2) + "\n")


@dataclass
class ValidationReport:
    class_histogram: dict[str, int]
    min_length: int
    max_length: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "class_histogram": self.class_histogram,
            "min_length": self.min_length,
            "max_length": self.max_length,
            "violations": list(self.violations),
        }


def validate_dataset(ds: Dataset) -> ValidationReport:
    """Summarize ``ds`` and list everything that blocks movelet discovery."""
    hist = dict(sorted(Counter(t.label for t in ds.trajectories).items()))
    lengths = [len(t) for t in ds.trajectories]
    violations = []
    if not ds.trajectories:
        violations.append("dataset has no trajectories")
    if len(hist) < 2:
        violations.append(f"need ≥ 2 classes, found {len(hist)}")
    tids = Counter(t.tid for t in ds.trajectories)
    for tid, count in sorted(tids.items()):
        if count > 1:
            violations.append(f"trajectory id {tid!r} appears {count} times")
    width = len(ds.schema)
    for t in ds.trajectories:
        if any(len(e) != width for e in t.elements):
            violations.append(f"trajectory {t.tid!r} does not conform to the schema")
    return ValidationReport(
        class_histogram=hist,
        min_length=min(lengths, default=0),
        max_length=max(lengths, default=0),
        violations=violations,
    )
