from fractions import Fraction

import pytest

from src.dynamics.maps import mixed_linear, mx_mod1
from src.exact.interval_set import cantor_approx
from src.theory.cantor_theory import (
    covering_counts, dim_estimate_from_counts, exceedance_cluster_set, incompatible_theta_sequence,
    k_schedule, obrien_theta, power_of_three_exponent, q_schedule, return_set, schedule,
    theoretical_ei, w_schedule,
)
from src.utils.error_handler import NoClosedFormException, ScheduleException, ValidationException

F = Fraction


@pytest.mark.parametrize("n", [*range(1, 7), *(pytest.param(n, marks=pytest.mark.full_scale) for n in (7, 8))])
def test_compatible_theta_tripling(n):
    plan = schedule(3, n)
    assert (plan.level, plan.q_n) == (n, n)
    result = obrien_theta(mx_mod1(3), plan.level, plan.q_n)
    assert result.theta_exact == F(1, 3)
    assert result.mu_u == F(2, 3) ** n


@pytest.mark.parametrize("n", [*range(1, 6), *(pytest.param(n, marks=pytest.mark.full_scale) for n in (6, 7, 8))])
def test_compatible_theta_nine(n):
    plan = schedule(9, n)
    assert (plan.level, plan.q_n) == k_schedule(2, n)
    assert obrien_theta(mx_mod1(9), plan.level, plan.q_n).theta_exact == F(5, 9)


def test_compatible_theta_closed_form():
    assert theoretical_ei("mx_mod1:3") == F(1, 3)
    assert theoretical_ei("mx_mod1:9") == F(5, 9)
    assert theoretical_ei("mx_mod1:27") == F(19, 27)
    assert theoretical_ei("mx_mod1:5") == 1
    assert theoretical_ei("mixed_linear") == F(2, 3)
    with pytest.raises(NoClosedFormException):
        theoretical_ei("gauss")


def test_cluster_set_for_tripling_is_next_level_gap():
    cluster = exceedance_cluster_set(mx_mod1(3), 3, 3)
    assert cluster == cantor_approx(3) - cantor_approx(4)


@pytest.mark.parametrize("m", [2, 5])
def test_incompatible_theta_strictly_increases(m):
    results = incompatible_theta_sequence(m, list(range(2, 9)))
    gaps = [1 - r.theta_exact for r in results]
    assert all(0 < gap < 1 for gap in gaps)
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))


def test_incompatible_theta_reference_values():
    assert 1 - incompatible_theta_sequence(2, [2])[0].theta_exact == F(15, 16)
    assert float(1 - incompatible_theta_sequence(5, [4])[0].theta_exact) == pytest.approx(0.428, abs=1e-3)


@pytest.mark.parametrize("m", [2, 5])
@pytest.mark.parametrize("n", [*range(1, 6), *(pytest.param(n, marks=pytest.mark.full_scale) for n in (6, 7, 8))])
def test_incompatible_return_set_bound(m, n):
    q = q_schedule(m, n)
    assert return_set(m, q, n).measure() <= 3 * F(2, 3) ** (2 * n)



def test_mixed_map_first_level():
    assert obrien_theta(mixed_linear(), 1, 1).theta_exact == F(1, 3)


def test_mixed_map_theta_nonincreasing_in_q():
    pmap = mixed_linear()
    thetas = [obrien_theta(pmap, 3, q).theta_exact for q in range(0, 5)]
    assert thetas[0] == 1
    assert all(later <= earlier for earlier, later in zip(thetas, thetas[1:]))


def test_mixed_map_theta_rises_toward_two_thirds():
    pmap = mixed_linear()
    thetas = [obrien_theta(pmap, n, n).theta_exact for n in range(2, 6)]
    assert all(earlier < later for earlier, later in zip(thetas, thetas[1:]))
    assert thetas[-1] < F(2, 3)


def test_mixed_map_left_cluster_in_next_gap():
    # On [0,1/3] the map triples, so clusters there sit in C_n minus C_{n+1}
    n = 3
    cluster = exceedance_cluster_set(mixed_linear(), n, n)
    left = cluster.clip(0, F(1, 3))
    gap = cantor_approx(n) - cantor_approx(n + 1)
    for lo, hi in left:
        assert gap.contains(lo) and gap.contains(hi)
        assert gap.component_index(lo) == gap.component_index(hi)


def test_q_schedule():
    assert q_schedule(2, 1) == 2
    assert q_schedule(5, 6) == 5
    assert q_schedule(2, 3) == 5
    assert q_schedule(5, 8) == 6
    assert q_schedule(4, 2) == 2
    with pytest.raises(ScheduleException):
        q_schedule(9, 3)


@pytest.mark.parametrize("m", range(2, 13))
def test_q_schedule_matches_definition(m):
    for n in range(1, 13):
        if power_of_three_exponent(m) is not None:
            with pytest.raises(ScheduleException):
                q_schedule(m, n)
            continue
        q = q_schedule(m, n)
        assert m ** q >= 3 ** n
        assert q == 0 or m ** (q - 1) < 3 ** n



def test_k_and_w_schedules():
    assert k_schedule(1, 4) == (4, 4)
    assert k_schedule(2, 3) == (4, 2)
    assert k_schedule(3, 1) == (3, 1)
    assert w_schedule(F(1), 2) == 2
    assert w_schedule(F(1, 2), 4) == 2
    assert schedule(5, 3, F(2)).w_n == 6


def test_power_of_three_exponent():
    assert power_of_three_exponent(27) == 3
    assert power_of_three_exponent(3) == 1
    assert power_of_three_exponent(6) is None
    assert power_of_three_exponent(1) is None


def test_covering_counts_tripling():
    # Every component of C_n meets C_n under 3x mod 1
    for n in range(1, 5):
        n_star, n_refined = covering_counts(3, 1, n, n + 2)
        assert n_star == 2 ** n
        assert n_refined == 2 ** n


def test_covering_counts_refine_monotone():
    for n in range(2, 5):
        n_star, n_refined = covering_counts(2, 1, n, n + 3)
        assert n_refined <= n_star <= 2 ** n


def test_dimension_estimate_needs_two_levels():
    with pytest.raises(ValidationException):
        dim_estimate_from_counts([(3, 8)])
    with pytest.raises(ValidationException):
        dim_estimate_from_counts([(3, 8), (3, 9)])


def test_dimension_estimate_of_full_cantor_set():
    counts = [(n, 2 ** n) for n in range(1, 6)]
    assert dim_estimate_from_counts(counts) == pytest.approx(0.6309297535714574)


def test_doubling_intersection_dimension_is_small():
    counts = [(n, covering_counts(2, 1, n)[0]) for n in range(3, 11)]
    assert dim_estimate_from_counts(counts) <= 0.6
    from src.theory.digraph import dim_bound
    assert dim_bound(2, 1) == 0.0
