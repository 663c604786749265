import logging

import numpy as np
import pytest

from src import config
from src.dynamics.maps import get_map, mx_mod1
from src.dynamics.orbits import (
    ObservableSeries, generate_batch, generate_series, iterate_orbits, sample_initial_points,
    warn_precision_collapse,
)
from src.services.simulation_service import SimulationService, resolve_burn_in
from src.utils.error_handler import DomainException, ValidationException


def test_initial_points_depend_only_on_orbit_index():
    full = sample_initial_points(10, seed=7)
    tail = sample_initial_points(4, seed=7, start=6)
    assert np.array_equal(full[6:], tail)
    assert not np.array_equal(full, sample_initial_points(10, seed=8))
    assert ((0.0 <= full) & (full < 1.0)).all()


def test_iterate_orbits_shape_and_burn_in():
    pmap = mx_mod1(3)
    x0 = np.array([0.1, 0.7])
    orbits = iterate_orbits(pmap, x0, 5)
    assert orbits.shape == (2, 5)
    assert np.allclose(orbits[:, 0], x0)
    assert np.allclose(orbits[:, 1], pmap.evaluate(x0))
    shifted = iterate_orbits(pmap, x0, 3, burn_in=2)
    assert np.allclose(shifted, orbits[:, 2:5])


def test_iterate_orbits_rejects_points_outside_unit():
    with pytest.raises(ValidationException):
        iterate_orbits(mx_mod1(3), np.array([1.2]), 3)
    with pytest.raises(DomainException):
        generate_series(mx_mod1(3), "ladder", 3, -0.5, 10)


def test_batch_matches_single_series():
    pmap = get_map("mixed_linear")
    x0 = sample_initial_points(5, seed=3)
    batch = generate_batch(pmap, "ladder", 200, x0, 30, first_index=10)
    for row, series in enumerate(batch):
        single = generate_series(pmap, "ladder", 200, x0[row], 30)
        assert np.array_equal(series.levels, single.levels)
        assert series.index == 10 + row
        assert len(series) == 200


def test_series_validation():
    series = ObservableSeries(np.array([1, 2, 3]), cap=3)
    assert series.to_text() == "1\n2\n3\n"
    with pytest.raises(ValueError):
        series.levels[0] = 2
    with pytest.raises(ValidationException):
        ObservableSeries(np.array([0, 1]), cap=3)
    with pytest.raises(ValidationException):
        ObservableSeries(np.array([1, 4]), cap=3)


def test_precision_collapse_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="cantor_ei.dynamics"):
        warn_precision_collapse(mx_mod1(4), 100)
    assert "reach 0" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="cantor_ei.dynamics"):
        warn_precision_collapse(mx_mod1(3), 10_000)
    assert caplog.text == ""


def test_burn_in_defaults():
    assert resolve_burn_in(mx_mod1(3), None) == 0
    assert resolve_burn_in(get_map("gauss"), None) == config.DEFAULT_BURN_IN
    assert resolve_burn_in(get_map("gauss"), 5) == 5


def test_results_independent_of_threads_and_batches():
    pmap = mx_mod1(5)
    serial = SimulationService(max_workers=1, batch_size=3).simulate(pmap, "ladder", 300, 10, 11, 40)
    threaded = SimulationService(max_workers=4, batch_size=4).simulate(pmap, "ladder", 300, 10, 11, 40)
    assert [s.index for s in serial] == list(range(10))
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.levels, b.levels)
        assert a.origin == b.origin


@pytest.mark.parametrize("kwargs,code", [
    (dict(n=0, ell=2, seed=0, cap=10), "MIN_VALUE"),
    (dict(n=10, ell=2, seed=-1, cap=10), "MIN_VALUE"),
    (dict(n=10, ell=2, seed=0, cap=20_000), "MAX_VALUE"),
    (dict(n=10.0, ell=2, seed=0, cap=10), "INVALID_TYPE"),
])
def test_service_rejects_bad_run_arguments(kwargs, code):
    with pytest.raises(ValidationException) as raised:
        SimulationService(max_workers=1).simulate(mx_mod1(3), "ladder", **kwargs)
    assert raised.value.code == code


def test_series_record_their_origin():
    series = SimulationService(max_workers=2, batch_size=2).simulate(mx_mod1(3), "ladder", 20, 3, 17, 40)
    x0 = sample_initial_points(3, seed=17)
    for row, item in enumerate(series):
        assert (item.map_id, item.seed, item.index) == ("mx_mod1:3", 17, row)
        assert item.origin == x0[row]
    assert generate_series(get_map("gauss"), "ladder", 5, 0.3, 10).map_id == "gauss"
