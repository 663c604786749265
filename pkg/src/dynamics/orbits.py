"""
Orbit simulation and observable series
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from .maps import Number, PiecewiseMap, check_domain
from .observables import Observable, get_observable
from ..utils.error_handler import ValidationException
from ..utils.logging_config import get_logger

logger = get_logger('dynamics')

# Double-precision mantissa bits; orbits of 2^k x mod 1 reach 0 after about this many / k steps
MANTISSA_BITS = 53


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Observable levels along one orbit started at origin = x0 of stream (seed, index)"""
    levels: np.ndarray
    cap: int
    origin: float = float('nan')
    index: Optional[int] = None
    map_id: Optional[str] = None
    seed: Optional[int] = None

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=np.int32)
        if levels.ndim != 1:
            raise ValidationException("Observable series must be one-dimensional", "INVALID_SERIES")
        if levels.size and (levels.min() < 1 or levels.max() > self.cap):
            raise ValidationException(
                f"Series levels must lie in [1, {self.cap}]", "INVALID_SERIES"
            )
        levels.setflags(write=False)
        object.__setattr__(self, 'levels', levels)

    def __len__(self) -> int:
        return int(self.levels.size)

    def to_text(self) -> str:
        return ''.join(f"{int(level)}\n" for level in self.levels)


def sample_initial_points(ell: int, seed: int, start: int = 0) -> np.ndarray:
    """Uniform starting points from one PCG64 stream per orbit index"""
    if ell < 0:
        raise ValidationException(f"Ensemble size must be nonnegative, got {ell}", "INVALID_ELL")
    points = np.empty(ell, dtype=float)
    for offset in range(ell):
        sequence = np.random.SeedSequence(seed, spawn_key=(start + offset,))
        points[offset] = np.random.Generator(np.random.PCG64(sequence)).random()
    return points


def iterate_orbits(pmap: PiecewiseMap, x0: np.ndarray, n: int, burn_in: int = 0) -> np.ndarray:
    """Orbits as an array of shape (len(x0), n); column i holds T^i after burn-in"""
    if n < 0 or burn_in < 0:
        raise ValidationException("Orbit length and burn-in must be nonnegative", "INVALID_LENGTH")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.size and (x.min() < 0.0 or x.max() > 1.0 or np.isnan(x).any()):
        raise ValidationException("Initial points must lie in [0,1]", "DOMAIN_ERROR")
    for _ in range(burn_in):
        x = pmap.evaluate(x)
    orbits = np.empty((x.size, n), dtype=float)
    for i in range(n):
        orbits[:, i] = x
        if i + 1 < n:
            x = pmap.evaluate(x)
    return orbits


def warn_precision_collapse(pmap: PiecewiseMap, n: int):
    """Even multipliers shift out mantissa bits and collapse orbits to 0"""
    m = pmap.mod1_multiplier
    if m is not None and m % 2 == 0:
        power_of_two = (m & -m).bit_length() - 1
        horizon = MANTISSA_BITS // power_of_two
        if n + 1 > horizon:
            logger.warning(
                f"{pmap.map_id}: double-precision orbits reach 0 after about {horizon} steps; "
                f"series of length {n} will be dominated by the fixed point"
            )


def generate_series(
    pmap: PiecewiseMap,
    observable: Union[str, Observable],
    n: int,
    x0: Number,
    cap: int,
    burn_in: int = 0,
) -> ObservableSeries:
    """Observable levels of T^i(x0), i = 0..n-1, after burn_in unrecorded steps"""
    check_domain(x0)
    observable = get_observable(observable)
    orbit = iterate_orbits(pmap, np.array([float(x0)]), n, burn_in)[0]
    return ObservableSeries(observable.levels(orbit, cap), cap, origin=float(x0), map_id=pmap.map_id)


def generate_batch(
    pmap: PiecewiseMap,
    observable: Union[str, Observable],
    n: int,
    x0: Sequence[float],
    cap: int,
    burn_in: int = 0,
    first_index: int = 0,
    seed: Optional[int] = None,
) -> List[ObservableSeries]:
    """Series for several starting points, simulated together"""
    observable = get_observable(observable)
    orbits = iterate_orbits(pmap, np.asarray(x0, dtype=float), n, burn_in)
    levels = observable.levels(orbits, cap)
    return [
        ObservableSeries(
            levels[row], cap, origin=float(x0[row]), index=first_index + row, map_id=pmap.map_id, seed=seed
        )
        for row in range(orbits.shape[0])
    ]
