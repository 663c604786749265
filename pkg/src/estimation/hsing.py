"""
Hsing runs estimator of the extremal index

theta_hat(u, q) = #{i : X_i > u, X_{i+1..i+q} <= u} / #{i : X_i > u},
both sums over i in [0, n-1-q].
"""

from typing import Iterable, List, Sequence, Union

import numpy as np

from ..dynamics.orbits import ObservableSeries
from ..models.schemas import EstimateRecord
from ..utils.error_handler import ValidationException

SeriesLike = Union[ObservableSeries, Sequence[int], np.ndarray]


def _levels(series: SeriesLike) -> np.ndarray:
    if isinstance(series, ObservableSeries):
        return series.levels
    return np.asarray(series, dtype=np.int64).reshape(-1)


def _counts(exceed: np.ndarray, q: int):
    n = exceed.size
    last = n - 1 - q
    if last < 0:
        return 0, 0
    head = exceed[:last + 1]
    denominator = int(head.sum())
    if q == 0:
        return denominator, denominator
    running = np.concatenate(([0], np.cumsum(exceed, dtype=np.int64)))
    starts = np.arange(last + 1)
    ahead = running[starts + q + 1] - running[starts + 1]
    numerator = int(np.count_nonzero(head & (ahead == 0)))
    return numerator, denominator


def _record(u: int, q: int, numerator: int, denominator: int) -> EstimateRecord:
    if denominator == 0:
        return EstimateRecord(u=u, q=q, numerator=0, denominator=0, theta_hat=None, defined=False)
    return EstimateRecord(
        u=u, q=q, numerator=numerator, denominator=denominator,
        theta_hat=numerator / denominator, defined=True
    )


def hsing_theta(series: SeriesLike, u: int, q: int) -> EstimateRecord:
    """Runs estimate at threshold u with run length q"""
    if q < 0:
        raise ValidationException(f"Run length q must be nonnegative, got {q}", "INVALID_GAPS")
    exceed = _levels(series) > u
    numerator, denominator = _counts(exceed, q)
    return _record(u, q, numerator, denominator)


def hsing_grid(series: SeriesLike, u_values: Iterable[int], q_values: Iterable[int]) -> List[EstimateRecord]:
    """Records for every (u, q), u ascending then q ascending"""
    levels = _levels(series)
    q_values = sorted(q_values)
    records = []
    for u in sorted(u_values):
        exceed = levels > u
        for q in q_values:
            numerator, denominator = _counts(exceed, q)
            records.append(_record(u, q, numerator, denominator))
    return records
