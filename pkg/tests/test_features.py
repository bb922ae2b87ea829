import math

import numpy as np
import pytest

from movelets.alignment import align_rows
from movelets.discovery import discover
from movelets.distance import subseq_distance
from movelets.features import FeatureMatrix, alignment_vectors, knn_classify, transform
from movelets.model import SchemaError
from movelets.synth import SynthConfig, generate

from conftest import checkin_dataset, combination_dataset, random_dataset


@pytest.fixture(scope="module")
def planted():
    ds, patterns = generate(SynthConfig(per_class=6, length=12, seed=21))
    return ds, patterns, discover(ds).to_json()


def test_own_source_is_one(planted):
    ds, _, movelets = planted
    fm = transform(ds, movelets)
    tids = [t.tid for t in ds.trajectories]
    for col, m in enumerate(movelets):
        if all(v > 0 for v in m["splits"].values()):
            assert fm.values[tids.index(m["tid"]), col] == 1


def test_short_trajectory_sentinel():
    ds = checkin_dataset()
    long_movelet = {
        "tid": "T", "start": 1, "end": 3, "dims": ["venue"], "splits": {"venue": 2.0}, "score": 1.0,
        "elements": [["Hotel"], ["Park"], ["Café"]],
    }
    binary = transform(ds, [long_movelet])
    raw = transform(ds, [long_movelet], mode="raw")
    assert binary.values[0, 0] == 0
    assert math.isinf(raw.values[0, 0])
    assert raw.values[1, 0] == 0
    assert raw.columns == ["m0.venue"]


def test_planted_columns_separate_classes(planted):
    ds, patterns, movelets = planted
    fm = transform(ds, movelets)
    labels = np.array(fm.labels)
    for p in patterns:
        target = labels == p.label
        separating = [c for c in range(fm.values.shape[1])
                      if np.array_equal(fm.values[:, c] == 1, target)]
        assert separating, f"no column isolates {p.label}"


def test_raw_matches_independent_alignment():
    rng = np.random.default_rng(6)
    ds = random_dataset(rng, n=4, d=3, m=5)
    movelets = discover(ds).to_json()[:6]
    fm = transform(ds, movelets, mode="raw")
    col = 0
    for m in movelets:
        dims = [ds.schema.index(n) for n in m["dims"]]
        src = next(t for t in ds.trajectories if t.tid == m["tid"])
        window = src.elements[m["start"] - 1:m["end"]]
        w = len(window)
        for r, T in enumerate(ds.trajectories):
            rows = np.array([
                [subseq_distance(window, T.elements[k:k + w], ds.schema)[d] for k in range(len(T) - w + 1)]
                for d in dims
            ]).reshape(len(dims), -1)
            want = align_rows(rows).distances
            np.testing.assert_allclose(fm.values[r, col:col + len(dims)], want, rtol=0, atol=1e-9)
        col += len(dims)


def test_transform_is_pure(planted):
    ds, _, movelets = planted
    a = transform(ds, movelets)
    b = transform(ds, movelets)
    assert np.array_equal(a.values, b.values)
    assert set(np.unique(a.values)) <= {0.0, 1.0}


def test_unknown_dimension():
    ds = combination_dataset()
    bad = {"tid": "T1", "start": 1, "end": 1, "dims": ["colour"], "splits": {"colour": 1.0},
           "score": 1.0, "elements": [["red"]]}
    with pytest.raises(SchemaError, match="colour"):
        transform(ds, [bad])


def test_csv_round_trip(tmp_path, planted):
    ds, _, movelets = planted
    for mode in ("binary", "raw"):
        fm = transform(ds, movelets[:5], mode=mode)
        fm.write_csv(tmp_path / f"{mode}.csv")
        back = FeatureMatrix.read_csv(tmp_path / f"{mode}.csv")
        assert back.columns == fm.columns and back.tids == fm.tids and back.labels == fm.labels
        assert np.array_equal(back.values, fm.values)
        assert (tmp_path / f"{mode}.csv").read_text().splitlines()[0].startswith("tid,label,m0")


def fm(rows, labels, mode="binary"):
    rows = np.array(rows, dtype=float)
    return FeatureMatrix([str(i) for i in range(len(rows))], labels, [f"m{i}" for i in range(rows.shape[1])], rows, mode)


def test_knn_identical_row():
    train = fm([[0, 1, 1], [1, 0, 0]], ["A", "B"])
    test = fm([[1, 0, 0]], ["B"])
    assert knn_classify(train, test, 1).predicted == ["B"]


def test_knn_two_rows():
    train = fm([[0, 0], [1, 1]], ["A", "B"])
    result = knn_classify(train, fm([[1, 1]], ["B"]), 1)
    assert result.predicted == ["B"] and result.accuracy == 1.0


def test_knn_vote_tie_smallest_label():
    train = fm([[0, 0], [1, 1]], ["B", "A"])
    assert knn_classify(train, fm([[0, 1]], ["A"]), 2).predicted == ["A"]


def test_knn_raw_caps_infinity():
    train = fm([[np.inf, 0.0], [5.0, 0.0]], ["A", "B"], mode="raw")
    test = fm([[np.inf, 0.0]], ["A"], mode="raw")
    assert knn_classify(train, test, 1).predicted == ["A"]


def test_knn_bad_k():
    train = fm([[0], [1]], ["A", "B"])
    with pytest.raises(ValueError):
        knn_classify(train, train, 0)
    with pytest.raises(ValueError):
        knn_classify(train, train, 3)


def test_alignment_vectors_shape(planted):
    ds, _, movelets = planted
    vecs = alignment_vectors(ds, movelets[:3])
    assert [v.shape for v in vecs] == [(len(ds), len(m["dims"])) for m in movelets[:3]]
