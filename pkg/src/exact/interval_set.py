"""
Exact finite unions of closed rational subintervals of [0,1]

Sets are kept in canonical form: sorted, pairwise disjoint, non-touching,
non-degenerate closed intervals. Touching intervals merge; single points
produced by intersecting touching intervals are Lebesgue-null and dropped.
"""

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from heapq import merge
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ..utils.error_handler import ValidationException
from ..utils.resource_manager import charge_operations, check_depth

Rational = Union[Fraction, int]
Pair = Tuple[Fraction, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def format_rational(value: Rational) -> str:
    """Render as p/q (or p for integers)"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def exact_sum(values: Iterable[Fraction]) -> Fraction:
    """Sum rationals grouping by denominator"""
    by_denominator = {}
    for value in values:
        by_denominator[value.denominator] = by_denominator.get(value.denominator, 0) + value.numerator
    return sum((Fraction(num, den) for den, num in by_denominator.items()), ZERO)


@dataclass(frozen=True, order=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not (ZERO <= lo <= hi <= ONE):
            raise ValidationException(
                f"Interval [{format_rational(lo)}, {format_rational(hi)}] is not a subinterval of [0,1]",
                "INVALID_INTERVAL"
            )
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __str__(self):
        return f"{format_rational(self.lo)} {format_rational(self.hi)}"


def _canonical(pairs: Iterable[Pair]) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """Merge sorted pairs into canonical endpoint tuples"""
    los: List[Fraction] = []
    his: List[Fraction] = []
    steps = 0
    for lo, hi in pairs:
        steps += 1
        if hi <= lo:
            continue
        if his and lo <= his[-1]:
            if hi > his[-1]:
                his[-1] = hi
        else:
            los.append(lo)
            his.append(hi)
    charge_operations(steps)
    return tuple(los), tuple(his)


class IntervalSet:
    """Immutable closed interval set in canonical form"""

    __slots__ = ('_los', '_his', '_measure', '_hash')

    def __init__(self, intervals: Iterable[Union[RationalInterval, Tuple[Rational, Rational]]] = ()):
        pairs = []
        for item in intervals:
            if not isinstance(item, RationalInterval):
                item = RationalInterval(*item)
            pairs.append((item.lo, item.hi))
        pairs.sort()
        self._los, self._his = _canonical(pairs)
        self._measure = None
        self._hash = None

    @classmethod
    def _from_sorted_pairs(cls, pairs: Iterable[Pair]) -> 'IntervalSet':
        instance = cls.__new__(cls)
        instance._los, instance._his = _canonical(pairs)
        instance._measure = None
        instance._hash = None
        return instance

    @classmethod
    def from_pairs(cls, pairs: Iterable[Pair]) -> 'IntervalSet':
        """Build from unsorted in-range pairs without per-interval validation"""
        return cls._from_sorted_pairs(sorted(pairs))

    @classmethod
    def empty(cls) -> 'IntervalSet':
        return cls._from_sorted_pairs(())

    @classmethod
    def unit(cls) -> 'IntervalSet':
        return cls._from_sorted_pairs(((ZERO, ONE),))

    # -- container protocol -------------------------------------------------

    def __iter__(self) -> Iterator[RationalInterval]:
        for lo, hi in zip(self._los, self._his):
            yield RationalInterval(lo, hi)

    def pairs(self) -> Iterator[Pair]:
        return zip(self._los, self._his)

    def __len__(self) -> int:
        return len(self._los)

    def __bool__(self) -> bool:
        return bool(self._los)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._los == other._los and self._his == other._his

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._los, self._his))
        return self._hash

    def __repr__(self) -> str:
        shown = ', '.join(
            f"[{format_rational(lo)}, {format_rational(hi)}]"
            for lo, hi in list(self.pairs())[:6]
        )
        more = f", ... ({len(self)} total)" if len(self) > 6 else ""
        return f"IntervalSet({{{shown}{more}}})"

    @property
    def lower_bound(self) -> Optional[Fraction]:
        return self._los[0] if self._los else None

    @property
    def upper_bound(self) -> Optional[Fraction]:
        return self._his[-1] if self._his else None

    # -- measures and queries ----------------------------------------------

    def measure(self) -> Fraction:
        if self._measure is None:
            self._measure = exact_sum(hi - lo for lo, hi in self.pairs())
        return self._measure

    def component_count(self) -> int:
        return len(self._los)

    def contains(self, x: Rational) -> bool:
        idx = bisect_right(self._los, x) - 1
        return idx >= 0 and x <= self._his[idx]

    def meets_interval(self, lo: Rational, hi: Rational) -> bool:
        """Closed-set contact with [lo, hi]; endpoints may lie outside [0,1]"""
        if hi < lo:
            return False
        idx = bisect_right(self._los, hi) - 1
        return idx >= 0 and self._his[idx] >= lo

    def meets(self, other: 'IntervalSet') -> bool:
        """Closed-set contact, touching points included"""
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        return any(large.meets_interval(lo, hi) for lo, hi in small.pairs())

    def clip(self, lo: Rational, hi: Rational, closed: bool = False) -> List[Pair]:
        """Pieces of self within [lo, hi]; closed=True keeps contact points"""
        pieces = []
        k = bisect_left(self._his, lo)
        los, his = self._los, self._his
        while k < len(los) and los[k] <= hi:
            a = los[k] if los[k] > lo else Fraction(lo)
            b = his[k] if his[k] < hi else Fraction(hi)
            if a < b or (closed and a == b):
                pieces.append((a, b))
            k += 1
        return pieces

    def component_index(self, x: Rational) -> Optional[int]:
        """Index of the component containing x"""
        idx = bisect_right(self._los, x) - 1
        if idx >= 0 and x <= self._his[idx]:
            return idx
        return None

    # -- Boolean algebra ----------------------------------------------------

    def union(self, other: 'IntervalSet') -> 'IntervalSet':
        return IntervalSet._from_sorted_pairs(merge(self.pairs(), other.pairs()))

    def intersect(self, other: 'IntervalSet') -> 'IntervalSet':
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        pieces: List[Pair] = []
        for lo, hi in small.pairs():
            pieces.extend(large.clip(lo, hi))
        return IntervalSet._from_sorted_pairs(pieces)

    def complement_in_unit(self) -> 'IntervalSet':
        """Closure of [0,1] minus self"""
        gaps: List[Pair] = []
        previous = ZERO
        for lo, hi in self.pairs():
            if lo > previous:
                gaps.append((previous, lo))
            previous = hi
        if previous < ONE:
            gaps.append((previous, ONE))
        return IntervalSet._from_sorted_pairs(gaps)

    def difference(self, other: 'IntervalSet') -> 'IntervalSet':
        if not other or not self:
            return self
        return self.intersect(other.clip_hull(self).complement_in_unit())

    def clip_hull(self, window: 'IntervalSet') -> 'IntervalSet':
        """Self restricted to the convex hull of window"""
        if not window:
            return IntervalSet.empty()
        return IntervalSet._from_sorted_pairs(self.clip(window.lower_bound, window.upper_bound, closed=True))

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def __invert__(self) -> 'IntervalSet':
        return self.complement_in_unit()

    # -- maps ---------------------------------------------------------------

    def affine_image(self, slope: Rational, intercept: Rational) -> List[Pair]:
        """Image pairs under x -> slope*x + intercept (not clipped to [0,1])"""
        slope, intercept = Fraction(slope), Fraction(intercept)
        if slope == 0:
            raise ValidationException("Affine image needs a nonzero slope", "ZERO_SLOPE")
        image = [(slope * lo + intercept, slope * hi + intercept) for lo, hi in self.pairs()]
        if slope < 0:
            image = [(b, a) for a, b in reversed(image)]
        return image

    # -- text format --------------------------------------------------------

    def to_text(self) -> str:
        return ''.join(f"{format_rational(lo)} {format_rational(hi)}\n" for lo, hi in self.pairs())

    @classmethod
    def from_text(cls, text: str) -> 'IntervalSet':
        intervals = []
        for line_number, line in enumerate(text.splitlines(), 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationException(
                    f"Line {line_number}: expected 'lo hi', got {line!r}", "INVALID_INTERVAL_TEXT"
                )
            try:
                intervals.append((Fraction(parts[0]), Fraction(parts[1])))
            except (ValueError, ZeroDivisionError) as e:
                raise ValidationException(f"Line {line_number}: {e}", "INVALID_INTERVAL_TEXT") from e
        return cls(intervals)


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.intersect(b)


def complement_in_unit(a: IntervalSet) -> IntervalSet:
    return a.complement_in_unit()


def difference(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.difference(b)


def measure(a: IntervalSet) -> Fraction:
    return a.measure()


def component_count(a: IntervalSet) -> int:
    return a.component_count()


@lru_cache(maxsize=32)
def _cantor_numerators(n: int) -> Tuple[int, ...]:
    starts = [0]
    for _ in range(n):
        starts = [child for s in starts for child in (3 * s, 3 * s + 2)]
    return tuple(starts)


@lru_cache(maxsize=32)
def _cantor_approx(n: int) -> IntervalSet:
    denominator = 3 ** n
    pairs = ((Fraction(s, denominator), Fraction(s + 1, denominator)) for s in _cantor_numerators(n))
    return IntervalSet._from_sorted_pairs(pairs)


def cantor_approx(n: int) -> IntervalSet:
    """C_n: the 2^n closed intervals of length 3^-n left by n middle-third removals"""
    if n < 0:
        raise ValidationException(f"Cantor depth must be nonnegative, got {n}", "INVALID_DEPTH")
    check_depth(n)
    return _cantor_approx(n)


def interval_set(pairs: Sequence[Tuple[Rational, Rational]]) -> IntervalSet:
    """Convenience constructor from (lo, hi) pairs"""
    return IntervalSet(pairs)
