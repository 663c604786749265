"""
Piecewise interval maps and the map zoo
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.error_handler import ConfigException, DomainException, ValidationException
from ..utils.logging_config import get_logger

logger = get_logger('dynamics')

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class AffineBranch:
    """x -> slope*x + intercept on [lo, hi], exact rationals"""
    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction
    is_exact_affine = True

    def __post_init__(self):
        for name in ('lo', 'hi', 'slope', 'intercept'):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.slope == 0:
            raise ValidationException("Affine branch slope must be nonzero", "ZERO_SLOPE")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return float(self.slope) * x + float(self.intercept)

    def exact(self, x: Fraction) -> Fraction:
        return self.slope * x + self.intercept

    @property
    def image(self) -> Tuple[Fraction, Fraction]:
        ends = sorted((self.exact(self.lo), self.exact(self.hi)))
        return ends[0], ends[1]


@dataclass(frozen=True)
class FloatAffineBranch:
    lo: float
    hi: float
    slope: float
    intercept: float
    is_exact_affine = False

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.slope * x + self.intercept


@dataclass(frozen=True)
class QuadraticBranch:
    """x -> a*x^2 + b*x + c"""
    lo: float
    hi: float
    a: float
    b: float
    c: float
    is_exact_affine = False

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return (self.a * x + self.b) * x + self.c


@dataclass(frozen=True)
class GaussBranch:
    lo: float = 0.0
    hi: float = 1.0
    is_exact_affine = False

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        positive = x > 0
        inverse = 1.0 / x[positive]
        out[positive] = inverse - np.floor(inverse)
        return out


@dataclass(frozen=True)
class RotationBranch:
    angle: float
    lo: float = 0.0
    hi: float = 1.0
    is_exact_affine = False

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return x + self.angle


Branch = Union[AffineBranch, FloatAffineBranch, QuadraticBranch, GaussBranch, RotationBranch]


@dataclass(frozen=True)
class PiecewiseMap:
    """Branches partition [0,1]; each is closed at its left endpoint, the last also at 1"""
    map_id: str
    branches: Tuple[Branch, ...]
    fold: bool = False
    lebesgue_invariant: bool = True
    mod1_multiplier: Optional[int] = None
    _breaks: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.branches:
            raise ValidationException(f"Map {self.map_id} has no branches", "EMPTY_MAP")
        object.__setattr__(self, 'branches', tuple(self.branches))
        if float(self.branches[0].lo) != 0.0 or float(self.branches[-1].hi) != 1.0:
            raise ValidationException(f"Branches of {self.map_id} must cover [0,1]", "INVALID_PARTITION")
        for left, right in zip(self.branches, self.branches[1:]):
            if left.hi != right.lo:
                raise ValidationException(
                    f"Branches of {self.map_id} must be contiguous at {float(left.hi)}", "INVALID_PARTITION"
                )
        if self.is_exact_affine and not self.fold:
            for branch in self.branches:
                lo, hi = branch.image
                if lo < 0 or hi > 1:
                    raise ValidationException(
                        f"Branch on [{branch.lo}, {branch.hi}] of {self.map_id} leaves [0,1]", "INVALID_BRANCH"
                    )
        breaks = np.array([float(branch.lo) for branch in self.branches[1:]], dtype=float)
        object.__setattr__(self, '_breaks', breaks)

    @property
    def is_exact_affine(self) -> bool:
        return all(branch.is_exact_affine for branch in self.branches)

    def branch_index(self, x: np.ndarray) -> np.ndarray:
        return np.searchsorted(self._breaks, x, side='right')

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Vectorized map evaluation, no domain checks"""
        x = np.asarray(x, dtype=float)
        if len(self.branches) == 1:
            y = self.branches[0].evaluate(x)
        else:
            index = self.branch_index(x)
            if self.is_exact_affine:
                slopes, intercepts = self._affine_tables()
                y = slopes[index] * x + intercepts[index]
            else:
                y = np.empty_like(x)
                for i, branch in enumerate(self.branches):
                    mask = index == i
                    if mask.any():
                        y[mask] = branch.evaluate(x[mask])
        if self.fold:
            y = y - np.floor(y)
        return np.clip(y, 0.0, 1.0)

    def _affine_tables(self) -> Tuple[np.ndarray, np.ndarray]:
        tables = self.__dict__.get('_tables')
        if tables is None:
            tables = (
                np.array([float(b.slope) for b in self.branches]),
                np.array([float(b.intercept) for b in self.branches]),
            )
            object.__setattr__(self, '_tables', tables)
        return tables

    def exact(self, x: Fraction) -> Fraction:
        """Exact image of a rational point under an affine map"""
        if not self.is_exact_affine:
            raise ValidationException(f"Map {self.map_id} has no exact evaluation", "UNSUPPORTED_MAP")
        x = Fraction(x)
        check_domain(x)
        branch = self.branches[int(self.branch_index(np.array([float(x)]))[0])]
        if not branch.lo <= x <= branch.hi:
            branch = next(b for b in self.branches if b.lo <= x <= b.hi)
        y = branch.exact(x)
        if self.fold:
            y -= math.floor(y)
        return y


def check_domain(x: Number):
    if not (0 <= x <= 1) or (isinstance(x, float) and math.isnan(x)):
        raise DomainException(f"Point {x} is outside [0,1]", "DOMAIN_ERROR", {'x': float(x)})


def eval_map(pmap: PiecewiseMap, x: Number) -> float:
    """T(x) for a single point in [0,1]"""
    check_domain(x)
    return float(pmap.evaluate(np.array([float(x)]))[0])


# -- the zoo ----------------------------------------------------------------

def mx_mod1(m: int) -> PiecewiseMap:
    """T(x) = m x mod 1 with branches m x - k on [k/m, (k+1)/m]"""
    if m < 2:
        raise ValidationException(f"Multiplier must be at least 2, got {m}", "INVALID_MULTIPLIER")
    branches = tuple(
        AffineBranch(Fraction(k, m), Fraction(k + 1, m), Fraction(m), Fraction(-k))
        for k in range(m)
    )
    return PiecewiseMap(f"mx_mod1:{m}", branches, lebesgue_invariant=True, mod1_multiplier=m)


def mixed_linear() -> PiecewiseMap:
    """3x on [0,1/3], 3x-1 on [1/3,2/3], five slope-15 branches on [2/3,1]"""
    third = Fraction(1, 3)
    branches = [
        AffineBranch(0, third, 3, 0),
        AffineBranch(third, 2 * third, 3, -1),
    ]
    for i in range(5):
        lo = Fraction(2, 3) + Fraction(i, 15)
        branches.append(AffineBranch(lo, lo + Fraction(1, 15), 15, -10 - i))
    return PiecewiseMap("mixed_linear", tuple(branches))


def nonlinear() -> PiecewiseMap:
    """(4/3) x (x+1) on [0,1/2), (4/3)(x^2 - 1/4) on [1/2,1]"""
    return PiecewiseMap(
        "nonlinear",
        (
            QuadraticBranch(0.0, 0.5, 4.0 / 3.0, 4.0 / 3.0, 0.0),
            QuadraticBranch(0.5, 1.0, 4.0 / 3.0, 0.0, -1.0 / 3.0),
        ),
        lebesgue_invariant=False,
    )


def gauss() -> PiecewiseMap:
    return PiecewiseMap("gauss", (GaussBranch(),), lebesgue_invariant=False)


def rotation(angle: float = math.pi / 3) -> PiecewiseMap:
    map_id = "rotation" if angle == math.pi / 3 else f"rotation:{angle!r}"
    return PiecewiseMap(map_id, (RotationBranch(angle),), fold=True)


QUADRATIC_LEFT_END = (3.0 - math.sqrt(3.0)) / 6.0
QUADRATIC_RIGHT_START = (3.0 + math.sqrt(3.0)) / 6.0


def quadratic_compatible() -> PiecewiseMap:
    """6x(1-x) on the outer pieces, increasing linear onto [0,1) in the middle"""
    width = QUADRATIC_RIGHT_START - QUADRATIC_LEFT_END
    return PiecewiseMap(
        "quadratic_compatible",
        (
            QuadraticBranch(0.0, QUADRATIC_LEFT_END, -6.0, 6.0, 0.0),
            FloatAffineBranch(QUADRATIC_LEFT_END, QUADRATIC_RIGHT_START, 1.0 / width, -QUADRATIC_LEFT_END / width),
            QuadraticBranch(QUADRATIC_RIGHT_START, 1.0, -6.0, 6.0, 0.0),
        ),
        lebesgue_invariant=False,
    )


def _parse_rational(token: str, path: Path, line_number: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigException(f"{path}:{line_number}: invalid rational {token!r}", "INVALID_SPEC_FILE") from e


def load_affine_map(path: Union[str, Path]) -> PiecewiseMap:
    """Read a piecewise-affine map: one 'lo hi slope intercept' branch per line"""
    path = Path(path)
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise ConfigException(f"Cannot read map file {path}: {e}", "INVALID_SPEC_FILE") from e
    branches = []
    for line_number, raw in enumerate(lines, 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 4:
            raise ConfigException(
                f"{path}:{line_number}: expected 'lo hi slope intercept'", "INVALID_SPEC_FILE"
            )
        branches.append(AffineBranch(*(_parse_rational(t, path, line_number) for t in tokens)))
    try:
        return PiecewiseMap(f"affine:{path}", tuple(branches))
    except ValidationException as e:
        raise ConfigException(f"{path}: {e.message}", "INVALID_SPEC_FILE") from e


_ZOO: Dict[str, Callable[[], PiecewiseMap]] = {
    "mixed_linear": mixed_linear,
    "nonlinear": nonlinear,
    "gauss": gauss,
    "rotation": rotation,
    "quadratic_compatible": quadratic_compatible,
}

ZOO_IDS: Sequence[str] = ("mx_mod1:<m>", *_ZOO, "rotation:<angle>", "affine:<file>", "ifs:<file>")


def get_map(map_id: str) -> PiecewiseMap:
    """Resolve a map id from the zoo"""
    name, _, argument = map_id.partition(':')
    if name in _ZOO and not argument:
        return _ZOO[name]()
    if name == "mx_mod1" and argument:
        try:
            return mx_mod1(int(argument))
        except ValueError as e:
            raise ConfigException(f"Invalid multiplier in map id {map_id!r}", "UNKNOWN_MAP") from e
    if name == "rotation" and argument:
        try:
            return rotation(float(argument))
        except ValueError as e:
            raise ConfigException(f"Invalid angle in map id {map_id!r}", "UNKNOWN_MAP") from e
    if name == "affine" and argument:
        return load_affine_map(argument)
    if name == "ifs" and argument:
        from ..theory.ifs_cantor import compatible_map, load_ifs
        return compatible_map(load_ifs(argument))
    raise ConfigException(
        f"Unknown map id {map_id!r}; known: {', '.join(ZOO_IDS)}", "UNKNOWN_MAP"
    )
