"""Element distance store and its incremental extension to longer windows.

``DistanceTensor.data[i, j, d, k]`` holds the dimension-``d`` distance between
the length-``w`` window of the source trajectory starting at ``j`` and the
length-``w`` window of trajectory ``i`` starting at ``k``. The ``k`` axis is
padded to the longest trajectory; cells past a trajectory's valid extent are
``+inf`` and never selected downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distance import Encoder, pairwise
from .model import Dataset, Trajectory


@dataclass(frozen=True)
class DistanceTensor:
    data: np.ndarray  # (n, m - w + 1, d, max_len - w + 1), float64
    w: int
    lengths: np.ndarray  # length of every trajectory i

    @property
    def extents(self) -> np.ndarray:
        """Number of valid window starts in each trajectory (0 if shorter than w)."""
        return np.maximum(self.lengths - self.w + 1, 0)

    def valid(self, i: int) -> np.ndarray:
        return self.data[i, :, :, : self.extents[i]]

    def dump_csv(self, path: str | Path) -> None:
        """Write every valid cell as ``i,j,d,k,value`` (debugging aid)."""
        with Path(path).open("w") as fh:
            fh.write("i,j,d,k,value\n")
            for i in range(self.data.shape[0]):
                block = self.valid(i)
                for j, d, k in np.ndindex(block.shape):
                    fh.write(f"{i},{j},{d},{k},{block[j, d, k]!r}\n")


def encode_dataset(ds: Dataset, encoder: Encoder | None = None) -> list[list[np.ndarray]]:
    encoder = encoder or Encoder()
    return [encoder.encode_elements(ds.schema, t.elements) for t in ds.trajectories]


def compute_element_distances(
    T: Trajectory | int,
    ds: Dataset,
    encoded: list[list[np.ndarray]] | None = None,
) -> DistanceTensor:
    """Distances between every element of ``T`` and every element of ``ds``.

    ``T`` may be given as a trajectory or as its index in ``ds``. Pass
    ``encoded`` (from :func:`encode_dataset`) to reuse one encoding across calls.
    """
    if encoded is None:
        encoded = encode_dataset(ds)
    if isinstance(T, Trajectory):
        source = Encoder()
        # re-encode jointly so nominal codes agree
        encoded = encode_dataset(Dataset(ds.schema, ds.trajectories + (T,)), source)
        src = encoded.pop()
    else:
        src = encoded[T]
    lengths = np.array([len(t) for t in ds.trajectories], dtype=np.int64)
    m = len(src[0])
    dims = len(ds.schema)
    kmax = int(lengths.max()) if len(lengths) else 0
    data = np.full((len(ds), m, dims, kmax), np.inf)
    for i, cols in enumerate(encoded):
        for d, desc in enumerate(ds.schema):
            data[i, :, d, : lengths[i]] = pairwise(desc, src[d], cols[d])
    return DistanceTensor(data, 1, lengths)


def csd(prev: DistanceTensor, base: DistanceTensor, w: int) -> DistanceTensor:
    """Window-``w`` distance sums from the window-``w-1`` sums.

    ``A_w[i, j, d, k] = A_{w-1}[i, j, d, k] + A_1[i, j+w-1, d, k+w-1]``.
    """
    if w < 2:
        raise ValueError("csd needs w >= 2")
    if prev.w != w - 1 or base.w != 1:
        raise ValueError(f"expected tensors of lengths {w - 1} and 1, got {prev.w} and {base.w}")
    n, m, dims, kmax = base.data.shape
    nj = max(m - w + 1, 0)
    nk = max(kmax - w + 1, 0)
    data = prev.data[:, :nj, :, :nk] + base.data[:, w - 1 : w - 1 + nj, :, w - 1 : w - 1 + nk]
    return DistanceTensor(data, w, base.lengths)
