import numpy as np
import pytest

from movelets.model import Dataset, DimensionDescriptor, Schema, Trajectory
from movelets.model import WEEKDAYS

# Distance rows of a two-check-in window against the six start positions of a
# seven-check-in trajectory (time in minutes, venue mismatches, price units).
TABLE_TIME = [435, 375, 300, 150, 0, 60]
TABLE_VENUE = [2, 2, 0, 2, 2, 0]
TABLE_PRICE = [1, 3, 3, 5, 3, 2]
TABLE_TIME_RANKS = [6.0, 5.0, 4.0, 3.0, 1.0, 2.0]
TABLE_VENUE_RANKS = [4.5, 4.5, 1.5, 4.5, 4.5, 1.5]
TABLE_PRICE_RANKS = [1.0, 4.0, 4.0, 6.0, 4.0, 2.0]

# Two-dimensional orderline: T1..T4 target class, T5..T8 opposite class.
SCENARIO = {
    "T1": ((0.0, 0.0), "L1"),
    "T2": ((2.0, 3.0), "L1"),
    "T3": ((3.0, 2.0), "L1"),
    "T4": ((3.0, 3.0), "L1"),
    "T5": ((1.0, 9.0), "L2"),
    "T6": ((9.0, 1.0), "L2"),
    "T7": ((4.0, 4.0), "L2"),
    "T8": ((5.0, 6.0), "L2"),
}


@pytest.fixture
def scenario_points():
    from movelets.relevance import OrderPoint

    return [OrderPoint(vec, label, i) for i, (vec, label) in enumerate(SCENARIO.values())]


def checkin_dataset():
    """Window (Café 10:30, Work 11:00) as its own trajectory plus a seven-check-in day."""
    schema = Schema((
        DimensionDescriptor("time", "temporal-hhmm", "minutes"),
        DimensionDescriptor("venue", "nominal", "binary"),
    ))
    s = Trajectory("s", "L1", (("10:30", "Café"), ("11:00", "Work")))
    day = Trajectory("T", "L2", (
        ("07:00", "Hotel"), ("07:15", "Park"), ("08:00", "Café"), ("08:30", "Work"),
        ("10:30", "Shop"), ("11:00", "Café"), ("11:30", "Work"),
    ))
    return Dataset(schema, (s, day))


def combination_dataset():
    """Only the (venue, price) pair separates L1 from L2; every single
    dimension and the time-including pairs fail."""
    schema = Schema((
        DimensionDescriptor("time", "temporal-hhmm", "minutes"),
        DimensionDescriptor("venue", "nominal", "binary"),
        DimensionDescriptor("price", "numeric", "abs"),
    ))

    def traj(tid, label, times, venues, prices):
        return Trajectory(tid, label, tuple(zip(times, venues, map(float, prices))))

    morning = ["07:00", "08:00", "09:00", "10:00"]
    noon = ["12:00", "13:00", "14:00", "15:00"]
    evening = ["18:00", "19:00", "20:00", "21:00"]
    return Dataset(schema, (
        traj("T1", "L1", morning, ["Home", "Café", "Mall", "Home"], [0, 1, 3, 0]),
        traj("T2", "L1", noon, ["Home", "Café", "Mall", "Home"], [0, 1, 3, 0]),
        traj("T3", "L2", morning, ["Shop", "Museum", "Hotel", "Shop"], [0, 1, 3, 0]),
        traj("T4", "L2", evening, ["Home", "Café", "Mall", "Home"], [2, 4, 1, 2]),
        traj("T5", "L2", noon, ["Home", "Work", "Mall", "Home"], [0, 2, 4, 0]),
    ))


def random_dataset(rng: np.random.Generator, n=None, m=None, d=None, kinds=None, integer=False) -> Dataset:
    """Small dataset with mixed dimension kinds and at least two classes."""
    n = n or int(rng.integers(2, 6))
    d = d or int(rng.integers(1, 4))
    if kinds is None:
        pool = ["nominal", "numeric", "temporal-hhmm", "weekday"] + ([] if integer else ["latlon-composite"])
        kinds = [pool[int(rng.integers(len(pool)))] for _ in range(d)]
    dims = tuple(DimensionDescriptor(f"x{k}", kind) for k, kind in enumerate(kinds))

    def value(kind):
        if kind == "nominal":
            return f"v{rng.integers(3)}"
        if kind == "numeric":
            return float(rng.integers(0, 20)) if integer else float(rng.normal(0, 5))
        if kind == "temporal-hhmm":
            t = int(rng.integers(0, 1440))
            return f"{t // 60:02d}:{t % 60:02d}"
        if kind == "weekday":
            return WEEKDAYS[int(rng.integers(7))]
        return (float(rng.uniform(-90, 90)), float(rng.uniform(-180, 180)))

    trajs = []
    for i in range(n):
        length = m if m is not None else int(rng.integers(1, 13))
        elements = tuple(tuple(value(k) for k in kinds) for _ in range(length))
        trajs.append(Trajectory(f"t{i}", "A" if i % 2 == 0 else "B", elements))
    return Dataset(Schema(dims), tuple(trajs))


# Acceptance results, filled by tests/test_acceptance.py and echoed after the run.
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'}  {detail}")
