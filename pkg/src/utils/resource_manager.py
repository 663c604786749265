"""
Resource management for cantor-ei
Handles exact-path caps, operation budgets and the worker pool
"""

from contextlib import contextmanager
from concurrent.futures import ThreadPoolExecutor
from contextvars import ContextVar, copy_context
from dataclasses import dataclass, replace
from typing import Optional, Callable, Any, Dict, Iterable, Iterator, List, TypeVar
import logging
import threading

from .. import config
from .error_handler import BudgetExceededException, ResourceLimitException

logger = logging.getLogger('cantor_ei.resources')

T = TypeVar('T')
R = TypeVar('R')


@dataclass(frozen=True)
class ResourceLimits:
    """Caps applied to exact computations"""
    max_depth: int = config.MAX_CANTOR_DEPTH
    max_denominator_bits: int = config.MAX_DENOMINATOR_BITS
    max_matrix_rows: int = config.MAX_MATRIX_ROWS
    max_operations: Optional[int] = config.MAX_OPERATIONS


class OperationBudget:
    """Counts interval merges against an optional ceiling"""

    def __init__(self, limit: Optional[int] = None):
        self.limit = limit
        self.used = 0
        self._lock = threading.Lock()

    def charge(self, amount: int = 1):
        with self._lock:
            self.used += amount
            if self.limit is not None and self.used > self.limit:
                raise BudgetExceededException(
                    f"Operation budget of {self.limit} exhausted",
                    "BUDGET_EXCEEDED",
                    {'used': self.used, 'limit': self.limit}
                )

    def get_stats(self) -> Dict[str, Any]:
        return {'used': self.used, 'limit': self.limit}


_limits: ContextVar[ResourceLimits] = ContextVar('cantor_ei_limits', default=ResourceLimits())
_budget: ContextVar[OperationBudget] = ContextVar('cantor_ei_budget', default=OperationBudget())


def current_limits() -> ResourceLimits:
    return _limits.get()


def current_budget() -> OperationBudget:
    return _budget.get()


@contextmanager
def resource_limits(**overrides) -> Iterator[ResourceLimits]:
    """Install caps (and a fresh budget) for the enclosed computation"""
    overrides = {key: value for key, value in overrides.items() if value is not None}
    limits = replace(current_limits(), **overrides)
    limits_token = _limits.set(limits)
    budget_token = _budget.set(OperationBudget(limits.max_operations))
    try:
        yield limits
    finally:
        _budget.reset(budget_token)
        _limits.reset(limits_token)


def charge_operations(amount: int):
    """Charge merge work to the active budget"""
    if amount:
        _budget.get().charge(amount)


def check_depth(n: int, what: str = "Cantor depth"):
    limit = current_limits().max_depth
    if n > limit:
        raise ResourceLimitException(
            f"{what} {n} exceeds the depth cap {limit}",
            "DEPTH_CAP",
            {'requested': n, 'limit': limit}
        )


def check_denominator(denominator: int):
    limit = current_limits().max_denominator_bits
    bits = denominator.bit_length()
    if bits > limit:
        raise ResourceLimitException(
            f"Denominator of {bits} bits exceeds the cap of {limit} bits",
            "DENOMINATOR_CAP",
            {'bits': bits, 'limit': limit}
        )


def check_matrix_rows(rows: int):
    limit = current_limits().max_matrix_rows
    if rows > limit:
        raise ResourceLimitException(
            f"Matrix with {rows} rows exceeds the cap of {limit} rows",
            "MATRIX_CAP",
            {'rows': rows, 'limit': limit}
        )


class WorkerPool:
    """Thread pool whose results come back in submission order"""

    def __init__(self, max_workers: int = 1):
        self.max_workers = max(1, int(max_workers))
        self._executor: Optional[ThreadPoolExecutor] = None
        self._completed = 0

    def __enter__(self):
        if self.max_workers > 1:
            self._executor = ThreadPoolExecutor(
                max_workers=self.max_workers,
                thread_name_prefix='cantor-ei'
            )
            logger.debug(f"Started worker pool with {self.max_workers} threads")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=exc_type is not None)
            self._executor = None
        return False

    def map_ordered(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Run func over items; each job sees a copy of the caller's context"""
        items = list(items)
        if self._executor is None:
            results = [func(item) for item in items]
        else:
            futures = [
                self._executor.submit(copy_context().run, func, item)
                for item in items
            ]
            results = [future.result() for future in futures]
        self._completed += len(items)
        return results

    def get_stats(self) -> Dict[str, Any]:
        return {
            'max_workers': self.max_workers,
            'completed_jobs': self._completed,
            'running': self._executor is not None
        }
