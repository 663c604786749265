"""
Exact preimages of interval sets under piecewise-affine maps
"""

from fractions import Fraction
from math import ceil, floor
from typing import List, Optional, TYPE_CHECKING

from .interval_set import IntervalSet, Pair, ZERO, ONE
from ..utils.error_handler import UnsupportedMapException, ValidationException
from ..utils.resource_manager import check_denominator

if TYPE_CHECKING:
    from ..dynamics.maps import PiecewiseMap

_UNIT_WINDOW = ((ZERO, ONE),)


def _max_denominator(a: IntervalSet) -> int:
    return max((max(lo.denominator, hi.denominator) for lo, hi in a.pairs()), default=1)


def preimage_mod1_affine(a: IntervalSet, m: int, j: int, window: Optional[IntervalSet] = None) -> IntervalSet:
    """T^-j(a) for T(x) = m x mod 1, optionally restricted to window

    The preimage is the union of the copies (a + k) / m^j, 0 <= k < m^j.
    With a window only the copies meeting the window are built.
    """
    if m < 2:
        raise ValidationException(f"Multiplier must be at least 2, got {m}", "INVALID_MULTIPLIER")
    if j < 0:
        raise ValidationException(f"Preimage order must be nonnegative, got {j}", "INVALID_ORDER")
    if j == 0:
        return a if window is None else a.intersect(window)
    if not a or (window is not None and not window):
        return IntervalSet.empty()

    scale = m ** j
    check_denominator(_max_denominator(a) * scale)

    windows = _UNIT_WINDOW if window is None else tuple(window.pairs())
    pieces: List[Pair] = []
    for wlo, whi in windows:
        k_first = max(0, floor(wlo * scale))
        k_last = min(scale - 1, ceil(whi * scale) - 1)
        for k in range(k_first, k_last + 1):
            local_lo = max(ZERO, wlo * scale - k)
            local_hi = min(ONE, whi * scale - k)
            for lo, hi in a.clip(local_lo, local_hi):
                pieces.append(((lo + k) / scale, (hi + k) / scale))
    return IntervalSet._from_sorted_pairs(pieces)


def _require_affine(pmap: 'PiecewiseMap'):
    if not pmap.is_exact_affine:
        kinds = sorted({type(branch).__name__ for branch in pmap.branches if not branch.is_exact_affine})
        raise UnsupportedMapException(
            f"Map {pmap.map_id} has non-affine branches ({', '.join(kinds)}); exact preimages need affine branches",
            "UNSUPPORTED_MAP",
            {'map_id': pmap.map_id}
        )


def _branch_window(branch, window: Optional[IntervalSet]) -> IntervalSet:
    domain = IntervalSet._from_sorted_pairs(((branch.lo, branch.hi),))
    return domain if window is None else domain.intersect(window)


def _pull_back(branch, pieces: List[Pair]) -> List[Pair]:
    """Branch preimage of pieces lying in the branch image"""
    slope, intercept = branch.slope, branch.intercept
    pulled = [((lo - intercept) / slope, (hi - intercept) / slope) for lo, hi in pieces]
    if slope < 0:
        pulled = [(b, a) for a, b in reversed(pulled)]
    return pulled


def _push_forward(branch, domain_window: IntervalSet) -> IntervalSet:
    image = domain_window.affine_image(branch.slope, branch.intercept)
    return IntervalSet._from_sorted_pairs(
        (max(ZERO, lo), min(ONE, hi)) for lo, hi in image
    )


def preimage_piecewise_affine(a: IntervalSet, pmap: 'PiecewiseMap',
                              window: Optional[IntervalSet] = None) -> IntervalSet:
    """T^-1(a) as the union of per-branch affine preimages"""
    return iterated_preimage(a, pmap, 1, window)


def iterated_preimage(a: IntervalSet, pmap: 'PiecewiseMap', j: int,
                      window: Optional[IntervalSet] = None) -> IntervalSet:
    """T^-j(a) restricted to window

    Each branch pushes its part of the window forward, the remaining
    j-1 preimages are taken inside that image, and the result is pulled back.
    """
    _require_affine(pmap)
    if j < 0:
        raise ValidationException(f"Preimage order must be nonnegative, got {j}", "INVALID_ORDER")
    if pmap.mod1_multiplier is not None:
        return preimage_mod1_affine(a, pmap.mod1_multiplier, j, window)
    if j == 0:
        return a if window is None else a.intersect(window)

    pieces: List[Pair] = []
    for branch in pmap.branches:
        domain_window = _branch_window(branch, window)
        if not domain_window:
            continue
        image_window = _push_forward(branch, domain_window)
        inner = iterated_preimage(a, pmap, j - 1, image_window)
        if not inner:
            continue
        check_denominator(_max_denominator(inner) * abs(branch.slope.denominator) * abs(branch.slope.numerator))
        pieces.extend(_pull_back(branch, list(inner.pairs())))
    pieces.sort()
    return IntervalSet._from_sorted_pairs(pieces)
