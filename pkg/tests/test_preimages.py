from fractions import Fraction

import pytest

from src.dynamics.maps import AffineBranch, PiecewiseMap, mixed_linear, mx_mod1, nonlinear
from src.exact.interval_set import IntervalSet, cantor_approx, interval_set
from src.exact.preimages import iterated_preimage, preimage_mod1_affine, preimage_piecewise_affine
from src.utils.error_handler import ResourceLimitException, UnsupportedMapException
from src.utils.resource_manager import resource_limits

F = Fraction


def _generic_mod1(m: int) -> PiecewiseMap:
    """m x mod 1 without the closed-form shortcut"""
    return PiecewiseMap(f"generic:{m}", mx_mod1(m).branches)


def test_tripling_preimage_of_cantor_step():
    # T^-1(C_1) for 3x mod 1 is C_2 plus the middle-third copy
    expected = cantor_approx(2) | interval_set([(F(1, 3), F(4, 9)), (F(5, 9), F(2, 3))])
    assert preimage_mod1_affine(cantor_approx(1), 3, 1) == expected


@pytest.mark.parametrize("m", [2, 3, 5])
@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_preimage_preserves_lebesgue_measure(m, j):
    a = cantor_approx(3)
    assert preimage_mod1_affine(a, m, j).measure() == a.measure()


@pytest.mark.parametrize("m", [2, 3, 5])
def test_closed_form_matches_branch_recursion(m):
    a = cantor_approx(2)
    window = cantor_approx(3)
    generic = _generic_mod1(m)
    for j in range(0, 4):
        assert preimage_mod1_affine(a, m, j, window) == iterated_preimage(a, generic, j, window)


def test_windowed_preimage_is_restriction(rng):
    a = cantor_approx(2)
    for _ in range(10):
        lo, hi = sorted(rng.integers(0, 28, size=2).tolist())
        window = interval_set([(F(lo, 27), F(hi, 27))])
        full = preimage_mod1_affine(a, 5, 2)
        assert preimage_mod1_affine(a, 5, 2, window) == full & window


def test_preimage_points_map_into_set():
    pmap = mixed_linear()
    a = cantor_approx(2)
    pre = iterated_preimage(a, pmap, 2)
    for lo, hi in pre.pairs():
        midpoint = (lo + hi) / 2
        assert a.contains(pmap.exact(pmap.exact(midpoint)))


def test_mixed_map_preimage_measure_is_invariant():
    pmap = mixed_linear()
    a = cantor_approx(3)
    assert preimage_piecewise_affine(a, pmap).measure() == a.measure()


def test_decreasing_branch():
    tent = PiecewiseMap("tent", (
        AffineBranch(0, F(1, 2), 2, 0),
        AffineBranch(F(1, 2), 1, -2, 2),
    ))
    pre = preimage_piecewise_affine(interval_set([(0, F(1, 4))]), tent)
    assert pre == interval_set([(0, F(1, 8)), (F(7, 8), 1)])


def test_non_affine_map_unsupported():
    with pytest.raises(UnsupportedMapException):
        iterated_preimage(cantor_approx(1), nonlinear(), 1)


def test_denominator_cap():
    with resource_limits(max_denominator_bits=16):
        with pytest.raises(ResourceLimitException):
            preimage_mod1_affine(cantor_approx(4), 5, 6)


def test_empty_inputs():
    assert preimage_mod1_affine(IntervalSet.empty(), 3, 2) == IntervalSet.empty()
    assert preimage_mod1_affine(cantor_approx(1), 3, 2, IntervalSet.empty()) == IntervalSet.empty()
