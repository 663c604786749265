"""
Ensemble sweeps of the runs estimator and stability regions
"""

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .hsing import SeriesLike, hsing_grid
from ..models.schemas import EstimateRecord, Plateau, SweepRow, SweepTable
from ..utils.error_handler import ValidationException


def _u_values(u_range: Tuple[int, int]) -> List[int]:
    u_min, u_max = u_range
    if u_min > u_max:
        raise ValidationException(f"Empty threshold range [{u_min}, {u_max}]", "INVALID_RANGE")
    return list(range(u_min, u_max + 1))


def aggregate_records(per_series: Iterable[Sequence[EstimateRecord]],
                      metadata: Optional[Dict[str, str]] = None) -> SweepTable:
    """Mean and sample sd of defined estimates per (u, q)

    Sums use math.fsum, so the result does not depend on ensemble order.
    """
    estimates: Dict[Tuple[int, int], List[float]] = {}
    undefined: Dict[Tuple[int, int], int] = {}
    for records in per_series:
        for record in records:
            key = (record.u, record.q)
            estimates.setdefault(key, [])
            undefined.setdefault(key, 0)
            if record.defined:
                estimates[key].append(record.theta_hat)
            else:
                undefined[key] += 1

    rows = []
    for u, q in sorted(estimates):
        values = estimates[(u, q)]
        count = len(values)
        if count == 0:
            mean = sd = None
        else:
            mean = math.fsum(values) / count
            sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (count - 1)) if count > 1 else 0.0
        rows.append(SweepRow(
            u=u, q=q, mean_theta=mean, sd_theta=sd,
            defined_count=count, undefined_count=undefined[(u, q)]
        ))
    return SweepTable(rows=rows, metadata=dict(metadata or {}))


def sweep(ensemble: Iterable[SeriesLike], u_range: Tuple[int, int], q_list: Sequence[int],
          metadata: Optional[Dict[str, str]] = None) -> SweepTable:
    """Per-(u, q) mean and sd of runs estimates over an ensemble"""
    u_values = _u_values(u_range)
    if not q_list:
        raise ValidationException("q list is empty", "INVALID_GAPS")
    return aggregate_records(
        (hsing_grid(series, u_values, q_list) for series in ensemble),
        metadata,
    )


def stability_region(table: SweepTable, window: int, eps: float) -> List[Plateau]:
    """Maximal u-intervals on which every run of `window` consecutive thresholds
    keeps all defined means (over all q) within eps of each other"""
    if window < 1:
        raise ValidationException(f"Window must be at least 1, got {window}", "INVALID_WINDOW")
    u_values = table.u_values()
    means: Dict[int, List[float]] = {u: [] for u in u_values}
    for row in table.rows:
        if row.mean_theta is not None:
            means[row.u].append(row.mean_theta)

    qualifying = []
    for start in range(len(u_values) - window + 1):
        span = u_values[start:start + window]
        if any(not means[u] for u in span):
            continue
        if any(b - a != 1 for a, b in zip(span, span[1:])):
            continue
        values = [value for u in span for value in means[u]]
        if max(values) - min(values) < eps:
            qualifying.append((span[0], span[-1]))

    merged: List[List[int]] = []
    for lo, hi in qualifying:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])

    plateaus = []
    for lo, hi in merged:
        values = [value for u in range(lo, hi + 1) for value in means[u]]
        plateaus.append(Plateau(u_lo=lo, u_hi=hi, value=math.fsum(values) / len(values)))
    return plateaus
