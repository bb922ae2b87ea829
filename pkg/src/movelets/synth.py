"""Synthetic labeled trajectories with planted multi-dimension patterns.

Every class owns a contiguous pattern over a subset of its dimensions,
inserted once into each of its trajectories. To make the *combination* of
dimensions matter, every trajectory of every other class additionally carries

* each single-dimension projection of that pattern, each in its own window
  (so no dimension alone tells the classes apart), and
* a near miss of the pattern: the full pattern with one value changed per
  planted dimension.

All dimensions are nominal; values are drawn uniformly from per-dimension
vocabularies. Randomness comes from numpy's PCG64 generator seeded with
``seed``, so a seed fully determines the output.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .model import Dataset, DimensionDescriptor, Schema, Trajectory, save_dataset, save_schema


@dataclass
class SynthConfig:
    classes: int = 2
    per_class: int = 20
    length: int = 20
    dims: int = 4
    pattern_length: int = 3
    planted_dims: int = 2
    vocab: list[int] = field(default_factory=list)  # one size per dimension; default 30
    seed: int = 42

    def __post_init__(self):
        if not self.vocab:
            self.vocab = [30] * self.dims
        problems = []
        if self.classes < 2:
            problems.append("classes must be >= 2")
        if self.per_class < 1:
            problems.append("per_class must be >= 1")
        if self.dims < 1:
            problems.append("dims must be >= 1")
        if not 1 <= self.planted_dims <= self.dims:
            problems.append("planted_dims must be in 1..dims")
        if not 1 <= self.pattern_length <= self.length:
            problems.append("pattern_length must be in 1..length")
        if len(self.vocab) != self.dims:
            problems.append(f"vocab lists {len(self.vocab)} sizes for {self.dims} dimensions")
        if any(v < 2 for v in self.vocab):
            problems.append("every vocabulary needs at least 2 values")
        if self.seed < 0:
            problems.append("seed must be unsigned")
        windows = self.windows_per_trajectory
        if windows * self.pattern_length > self.length:
            problems.append(
                f"{windows} planted windows of length {self.pattern_length} "
                f"do not fit in length {self.length}"
            )
        if problems:
            raise ValueError("invalid synth config: " + "; ".join(problems))

    @property
    def windows_per_trajectory(self) -> int:
        return 1 + (self.classes - 1) * (self.planted_dims + 1)


@dataclass
class PlantedPattern:
    label: str
    dims: list[int]
    values: list[list[str]]  # pattern_length rows, one value per planted dim
    starts: dict[str, int]  # tid -> 1-based window start


def dim_name(k: int) -> str:
    return f"d{k + 1}"


def _token(k: int, v: int) -> str:
    return f"{dim_name(k)}v{v}"


def _place(rng: np.random.Generator, n_windows: int, width: int, length: int) -> list[int]:
    """Random non-overlapping 0-based starts for ``n_windows`` windows, in random order."""
    slack = length - n_windows * width
    offsets = np.sort(rng.integers(0, slack + 1, size=n_windows))
    starts = [int(o) + t * width for t, o in enumerate(offsets)]
    return [starts[i] for i in rng.permutation(n_windows)]


def generate(cfg: SynthConfig) -> tuple[Dataset, list[PlantedPattern]]:
    rng = np.random.default_rng(cfg.seed)
    labels = [f"L{c + 1}" for c in range(cfg.classes)]
    patterns = []
    for label in labels:
        dims = sorted(int(k) for k in rng.choice(cfg.dims, size=cfg.planted_dims, replace=False))
        values = [[int(rng.integers(cfg.vocab[k])) for k in dims] for _ in range(cfg.pattern_length)]
        patterns.append((label, dims, values))

    trajectories = []
    planted = {label: PlantedPattern(label, dims, [[_token(k, v) for k, v in zip(dims, row)] for row in values], {})
               for label, dims, values in patterns}
    p = cfg.pattern_length
    width = len(str(cfg.classes * cfg.per_class))
    tid_no = 0
    for c, label in enumerate(labels):
        for _ in range(cfg.per_class):
            tid_no += 1
            tid = f"t{tid_no:0{width}d}"
            grid = np.stack([rng.integers(cfg.vocab[k], size=cfg.length) for k in range(cfg.dims)], axis=1)
            starts = _place(rng, cfg.windows_per_trajectory, p, cfg.length)
            own_dims, own_values = patterns[c][1], patterns[c][2]
            s = starts.pop()
            for t in range(p):
                grid[s + t, own_dims] = own_values[t]
            planted[label].starts[tid] = s + 1
            for other, odims, ovalues in patterns:
                if other == label:
                    continue
                # one window per single-dimension projection
                for q, k in enumerate(odims):
                    s = starts.pop()
                    for t in range(p):
                        grid[s + t, k] = ovalues[t][q]
                # near miss: full pattern, one changed value per planted dimension
                s = starts.pop()
                for t in range(p):
                    grid[s + t, odims] = ovalues[t]
                for q, k in enumerate(odims):
                    t = q % p
                    shift = 1 + int(rng.integers(cfg.vocab[k] - 1))
                    grid[s + t, k] = (ovalues[t][q] + shift) % cfg.vocab[k]
            elements = tuple(tuple(_token(k, int(v)) for k, v in enumerate(row)) for row in grid)
            trajectories.append(Trajectory(tid, label, elements))

    schema = Schema(tuple(DimensionDescriptor(dim_name(k), "nominal", "binary") for k in range(cfg.dims)))
    return Dataset(schema, tuple(trajectories)), list(planted.values())


def ground_truth(cfg: SynthConfig, patterns: list[PlantedPattern]) -> dict:
    return {
        "config": asdict(cfg),
        "classes": {
            p.label: {
                "dims": [dim_name(k) for k in p.dims],
                "pattern": p.values,
                "starts": p.starts,
            }
            for p in patterns
        },
    }


def write_synth(cfg: SynthConfig, out_dir: str | Path) -> dict[str, Path]:
    """Write ``data.csv``, ``schema.json`` and ``truth.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds, patterns = generate(cfg)
    paths = {"data": out / "data.csv", "schema": out / "schema.json", "truth": out / "truth.json"}
    save_dataset(ds, paths["data"])
    save_schema(ds.schema, paths["schema"])
    paths["truth"].write_text(json.dumps(ground_truth(cfg, patterns), indent=2, sort_keys=True) + "\n")
    return paths


def contains_window(trajectory: Trajectory, dims: list[int], values: list[list]) -> list[int]:
    """1-based starts where ``values`` appear contiguously on ``dims``."""
    p = len(values)
    hits = []
    for s in range(len(trajectory) - p + 1):
        if all(trajectory.elements[s + t][k] == values[t][q] for t in range(p) for q, k in enumerate(dims)):
            hits.append(s + 1)
    return hits


def stratified_split(ds: Dataset, train_fraction: float = 0.7, seed: int = 0) -> tuple[list[int], list[int]]:
    """Per-class shuffled split of trajectory indices; both index lists come back sorted."""
    rng = np.random.default_rng(seed)
    train, test = [], []
    for label in ds.classes:
        idx = [i for i, t in enumerate(ds.trajectories) if t.label == label]
        idx = [idx[i] for i in rng.permutation(len(idx))]
        cut = int(round(train_fraction * len(idx)))
        train.extend(idx[:cut])
        test.extend(idx[cut:])
    return sorted(train), sorted(test)
