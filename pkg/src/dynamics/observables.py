"""
Integer-valued observables maximised on Cantor sets
"""

from dataclasses import dataclass
from typing import Dict, Union

import numpy as np

from .maps import Number, check_domain
from ..utils.error_handler import ConfigException, ValidationException

ONE_THIRD = 1.0 / 3.0
TWO_THIRDS = 2.0 / 3.0


def _check_cap(cap: int):
    if cap < 1:
        raise ValidationException(f"Observable cap must be at least 1, got {cap}", "INVALID_CAP")


def ladder_levels(x: np.ndarray, cap: int) -> np.ndarray:
    """Vectorized ternary ladder

    Level j means the point falls in an open gap removed at construction
    step j; points still in C_cap get the cap.
    """
    _check_cap(cap)
    y = np.array(x, dtype=float, copy=True).reshape(-1)
    levels = np.full(y.shape, cap, dtype=np.int32)
    active = np.arange(y.size)
    for level in range(1, cap + 1):
        if active.size == 0:
            break
        current = y[active]
        in_gap = (current > ONE_THIRD) & (current < TWO_THIRDS)
        levels[active[in_gap]] = level
        keep = ~in_gap
        active = active[keep]
        current = current[keep]
        y[active] = np.where(current <= ONE_THIRD, 3.0 * current, 3.0 * current - 2.0)
    return levels.reshape(np.shape(x))


def ternary_ladder(x: Number, cap: int) -> int:
    """Gap index of x in the middle-thirds construction, capped"""
    check_domain(x)
    return int(ladder_levels(np.array([float(x)]), cap)[0])


@dataclass(frozen=True)
class QuadraticMap:
    """g(x) = a x^2 + b x + c"""
    a: float = -6.0
    b: float = 6.0
    c: float = 0.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (self.a * x + self.b) * x + self.c


SURVIVOR_QUADRATIC = QuadraticMap()


def escape_levels(x: np.ndarray, cap: int, g: QuadraticMap = SURVIVOR_QUADRATIC) -> np.ndarray:
    """Vectorized escape time: least j <= cap with g^j(x) outside [0,1]"""
    _check_cap(cap)
    y = np.array(x, dtype=float, copy=True).reshape(-1)
    levels = np.full(y.shape, cap, dtype=np.int32)
    active = np.arange(y.size)
    current = y
    for step in range(1, cap + 1):
        if active.size == 0:
            break
        current = g(current)
        escaped = (current < 0.0) | (current > 1.0)
        levels[active[escaped]] = step
        active = active[~escaped]
        current = current[~escaped]
    return levels.reshape(np.shape(x))


def escape_time(x: Number, g: QuadraticMap = SURVIVOR_QUADRATIC, cap: int = 100) -> int:
    check_domain(x)
    return int(escape_levels(np.array([float(x)]), cap, g)[0])


@dataclass(frozen=True)
class Observable:
    """Named observable usable on orbit arrays"""
    name: str
    quadratic: QuadraticMap = SURVIVOR_QUADRATIC

    def levels(self, x: np.ndarray, cap: int) -> np.ndarray:
        if self.name == "ladder":
            return ladder_levels(x, cap)
        return escape_levels(x, cap, self.quadratic)


_OBSERVABLES: Dict[str, Observable] = {
    "ladder": Observable("ladder"),
    "escape": Observable("escape"),
}


def get_observable(name: Union[str, Observable]) -> Observable:
    if isinstance(name, Observable):
        return name
    if name not in _OBSERVABLES:
        raise ConfigException(
            f"Unknown observable {name!r}; known: {', '.join(_OBSERVABLES)}", "UNKNOWN_OBSERVABLE"
        )
    return _OBSERVABLES[name]
