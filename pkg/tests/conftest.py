from pathlib import Path

import pytest

from dsts.core import Instance, Trailer

GOLDEN = Path(__file__).parent / "golden"

# the worked 10-trailer example: (id, arrival, due); p=5, delta=1, f=g=100
EXAMPLE_ROWS = [
    (1, 5, 15), (2, 5, 20), (3, 5, 25), (4, 10, 35), (5, 10, 40),
    (6, 15, 45), (7, 20, 45), (8, 15, 50), (9, 25, 45), (10, 30, 50),
]


def example_instance(horizon: int = 30, n: int = 10) -> Instance:
    trailers = tuple(Trailer(i, r, due, 5, 1, 100, 100)
                     for i, r, due in EXAMPLE_ROWS[:n])
    return Instance(name=f"illustrative_T{horizon}", docks=3, horizon=horizon,
                    trailers=trailers)


@pytest.fixture
def example30() -> Instance:
    return example_instance(30)


@pytest.fixture
def example70() -> Instance:
    return example_instance(70)


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN
