"""Ensemble simulation service for orbit series and runs-estimator sweeps"""

import time
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .. import config
from ..dynamics.maps import PiecewiseMap
from ..dynamics.observables import Observable, get_observable
from ..dynamics.orbits import ObservableSeries, generate_batch, sample_initial_points, warn_precision_collapse
from ..estimation.hsing import hsing_grid
from ..estimation.sweep import aggregate_records
from ..models.schemas import EstimateRecord, SweepTable
from ..utils.error_handler import ValidationException, validate_input
from ..utils.logging_config import PerformanceLogger, get_logger, log_simulation
from ..utils.resource_manager import WorkerPool

logger = get_logger('services')


def resolve_burn_in(pmap: PiecewiseMap, burn_in: Optional[int]) -> int:
    """Explicit burn-in, else the default for maps without Lebesgue invariance"""
    if burn_in is not None:
        return validate_input("burn_in", burn_in)
    return 0 if pmap.lebesgue_invariant else config.DEFAULT_BURN_IN


class SimulationService:
    """Runs orbit ensembles in batches on a bounded worker pool

    Orbit i always starts from the PRNG stream (seed, i), so results do
    not depend on the batch size or the number of workers.
    """

    def __init__(self, max_workers: int = config.DEFAULT_THREADS,
                 batch_size: int = config.ORBIT_BATCH_SIZE):
        if batch_size < 1:
            raise ValidationException("Batch size must be at least 1", "INVALID_BATCH")
        self.max_workers = max_workers
        self.batch_size = batch_size

    @staticmethod
    def _check_run(n, ell, seed, cap) -> Tuple[int, int, int, int]:
        return tuple(validate_input(name, value) for name, value in
                     (("n", n), ("ell", ell), ("seed", seed), ("cap", cap)))

    def _batches(self, ell: int) -> List[Tuple[int, int]]:
        return [(start, min(ell, start + self.batch_size)) for start in range(0, ell, self.batch_size)]

    def simulate(self, pmap: PiecewiseMap, observable: Union[str, Observable], n: int, ell: int,
                 seed: int, cap: int, burn_in: Optional[int] = None) -> List[ObservableSeries]:
        """Observable series for orbits 0..ell-1"""
        n, ell, seed, cap = self._check_run(n, ell, seed, cap)
        observable = get_observable(observable)
        burn_in = resolve_burn_in(pmap, burn_in)
        warn_precision_collapse(pmap, n + burn_in)

        def run_batch(bounds: Tuple[int, int]) -> List[ObservableSeries]:
            start, stop = bounds
            x0 = sample_initial_points(stop - start, seed, start=start)
            return generate_batch(pmap, observable, n, x0, cap, burn_in, first_index=start, seed=seed)

        started = time.perf_counter()
        with WorkerPool(self.max_workers) as pool:
            batches = pool.map_ordered(run_batch, self._batches(ell))
        log_simulation(pmap.map_id, ell, n, time.perf_counter() - started)
        return [series for batch in batches for series in batch]

    def estimate(self, pmap: PiecewiseMap, observable: Union[str, Observable], n: int, ell: int,
                 seed: int, cap: int, u_values: Sequence[int], q_values: Sequence[int],
                 burn_in: Optional[int] = None) -> List[List[EstimateRecord]]:
        """Per-orbit runs estimates; series are dropped once estimated"""
        n, ell, seed, cap = self._check_run(n, ell, seed, cap)
        observable = get_observable(observable)
        burn_in = resolve_burn_in(pmap, burn_in)
        warn_precision_collapse(pmap, n + burn_in)

        def run_batch(bounds: Tuple[int, int]) -> List[List[EstimateRecord]]:
            start, stop = bounds
            x0 = sample_initial_points(stop - start, seed, start=start)
            batch = generate_batch(pmap, observable, n, x0, cap, burn_in, first_index=start, seed=seed)
            return [hsing_grid(series, u_values, q_values) for series in batch]

        with PerformanceLogger(f"estimate {pmap.map_id} n={n} ell={ell}"):
            with WorkerPool(self.max_workers) as pool:
                batches = pool.map_ordered(run_batch, self._batches(ell))
        return [records for batch in batches for records in batch]

    def sweep(self, pmap: PiecewiseMap, observable: Union[str, Observable], n: int, ell: int,
              seed: int, cap: int, u_range: Tuple[int, int], q_list: Iterable[int],
              burn_in: Optional[int] = None) -> SweepTable:
        """Ensemble sweep table tagged with its run parameters"""
        observable = get_observable(observable)
        u_min, u_max = u_range
        if u_min > u_max:
            raise ValidationException(f"Empty threshold range [{u_min}, {u_max}]", "INVALID_RANGE")
        q_values = sorted(set(q_list))
        records = self.estimate(
            pmap, observable, n, ell, seed, cap, list(range(u_min, u_max + 1)), q_values, burn_in
        )
        metadata = {
            'map': pmap.map_id,
            'observable': observable.name,
            'n': str(n),
            'ell': str(ell),
            'seed': str(seed),
            'burn_in': str(resolve_burn_in(pmap, burn_in)),
        }
        table = aggregate_records(records, metadata)
        undefined = sum(row.undefined_count for row in table.rows)
        if undefined:
            logger.info(f"{pmap.map_id}: {undefined} undefined estimates excluded from means")
        return table
