import csv
from pathlib import Path

import pytest

from sparsetrig import bounds, partitions

GOLDEN = Path(__file__).parent / "golden"


def load_golden(name):
    """Golden census CSV -> {(t, s, R): count}, zeros included."""
    table = {}
    with open(GOLDEN / name, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            table[(int(row["t"]), int(row["s"]), int(row["R"]))] = int(row["count"])
    return table


@pytest.fixture(scope="session")
def cycle_census():
    # memoized in the library; shared across the whole run
    return {n: partitions.rank_census(n) for n in (4, 6, 8)}


@pytest.fixture(scope="session")
def census_set():
    return bounds.CensusSet.for_orders((2, 3, 4))
