import os
from fractions import Fraction

import numpy as np
import pytest

from src.exact.interval_set import IntervalSet
from src.utils.resource_manager import resource_limits


def pytest_collection_modifyitems(config, items):
    if os.getenv("CANTOR_EI_FULL_SCALE") == "1":
        return
    skip = pytest.mark.skip(reason="set CANTOR_EI_FULL_SCALE=1 to run full-size experiments")
    for item in items:
        if "full_scale" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def limits():
    """Fresh default caps and budget for one test"""
    with resource_limits() as active:
        yield active


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_interval_set(rng, denominator: int = 12, count: int = 4) -> IntervalSet:
    """Random union of closed intervals with endpoints k/denominator"""
    pairs = []
    for _ in range(count):
        a, b = sorted(rng.integers(0, denominator + 1, size=2).tolist())
        pairs.append((Fraction(a, denominator), Fraction(b, denominator)))
    return IntervalSet(pairs)


def grid_members(a: IntervalSet, points) -> np.ndarray:
    """Membership of each grid point, by scanning the intervals"""
    return np.array([any(lo <= x <= hi for lo, hi in a.pairs()) for x in points])


# Odd numerators over an even denominator never hit endpoints k/12
ODD_GRID = [Fraction(2 * i + 1, 240) for i in range(120)]
