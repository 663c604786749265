import math

import pytest

from src.estimation.hsing import hsing_theta
from src.estimation.sweep import aggregate_records, stability_region, sweep
from src.models.schemas import EstimateRecord, SweepRow, SweepTable
from src.utils.error_handler import ValidationException


def _record(u, q, numerator, denominator):
    if denominator == 0:
        return EstimateRecord(u=u, q=q, numerator=0, denominator=0, theta_hat=None, defined=False)
    return EstimateRecord(u=u, q=q, numerator=numerator, denominator=denominator,
                          theta_hat=numerator / denominator)


def test_aggregate_mean_and_sample_sd():
    per_series = [
        [_record(5, 1, 1, 2)],
        [_record(5, 1, 1, 1)],
        [_record(5, 1, 0, 0)],
        [_record(5, 1, 1, 4)],
    ]
    table = aggregate_records(per_series, {'map': 'x'})
    row = table.row(5, 1)
    values = [0.5, 1.0, 0.25]
    mean = sum(values) / 3
    assert row.mean_theta == pytest.approx(mean)
    assert row.sd_theta == pytest.approx(math.sqrt(sum((v - mean) ** 2 for v in values) / 2))
    assert (row.defined_count, row.undefined_count) == (3, 1)
    assert table.metadata == {'map': 'x'}


def test_aggregate_single_and_no_defined_values():
    table = aggregate_records([[_record(1, 1, 1, 2), _record(2, 1, 0, 0)]])
    assert table.row(1, 1).sd_theta == 0.0
    assert table.row(2, 1).mean_theta is None
    assert table.row(2, 1).defined_count == 0


def test_sweep_is_independent_of_ensemble_order(rng):
    ensemble = [rng.integers(1, 15, size=400) for _ in range(25)]
    forward = sweep(ensemble, (3, 9), [1, 5])
    backward = sweep(list(reversed(ensemble)), (3, 9), [5, 1])
    assert forward.rows == backward.rows
    assert forward.u_values() == list(range(3, 10))
    assert forward.q_values() == [1, 5]


def test_sweep_matches_per_series_estimates(rng):
    ensemble = [rng.integers(1, 10, size=300) for _ in range(5)]
    table = sweep(ensemble, (4, 4), [2])
    values = [hsing_theta(series, 4, 2).theta_hat for series in ensemble]
    values = [v for v in values if v is not None]
    assert table.row(4, 2).mean_theta == pytest.approx(sum(values) / len(values))


def test_sweep_rejects_bad_ranges():
    with pytest.raises(ValidationException):
        sweep([[1, 2, 3]], (5, 4), [1])
    with pytest.raises(ValidationException):
        sweep([[1, 2, 3]], (1, 2), [])


def _table(means):
    rows = []
    for u, by_q in means.items():
        for q, mean in by_q.items():
            rows.append(SweepRow(u=u, q=q, mean_theta=mean, sd_theta=0.0,
                                 defined_count=0 if mean is None else 1))
    return SweepTable(rows=rows)


def test_stability_region_finds_plateau():
    means = {u: {1: 0.9, 5: 0.5} for u in range(5, 9)}
    means.update({u: {1: 0.36, 5: 0.34} for u in range(9, 15)})
    means.update({u: {1: 0.2, 5: None} for u in range(15, 17)})
    plateaus = stability_region(_table(means), window=3, eps=0.03)
    assert len(plateaus) == 1
    plateau = plateaus[0]
    assert (plateau.u_lo, plateau.u_hi) == (9, 14)
    assert plateau.value == pytest.approx(0.35)


def test_stability_region_none_when_noisy():
    means = {u: {1: 0.1 * (u % 2), 5: 0.5} for u in range(1, 10)}
    assert stability_region(_table(means), window=2, eps=0.01) == []


def test_stability_region_splits_separate_plateaus():
    means = {u: {1: 0.3} for u in range(1, 4)}
    means.update({4: {1: 0.9}})
    means.update({u: {1: 0.6} for u in range(5, 8)})
    plateaus = stability_region(_table(means), window=3, eps=0.05)
    assert [(p.u_lo, p.u_hi) for p in plateaus] == [(1, 3), (5, 7)]
    with pytest.raises(ValidationException):
        stability_region(_table(means), window=0, eps=0.05)
