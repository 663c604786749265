"""
Exact extremal-index values for Cantor-set observables

The extremal index of the ladder observable at threshold set U is
computed as the ratio mu(A_{q,L}) / mu(U), with
A_{q,L} = U minus the points returning to U within q steps.
"""

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..dynamics.maps import PiecewiseMap, mx_mod1
from ..exact.interval_set import IntervalSet, cantor_approx
from ..exact.preimages import iterated_preimage, preimage_mod1_affine
from ..models.schemas import Schedule, TheoryResult
from ..utils.error_handler import NoClosedFormException, ScheduleException, ValidationException
from ..utils.logging_config import PerformanceLogger, get_logger, log_exact_operation

logger = get_logger('theory')


def power_of_three_exponent(m: int) -> Optional[int]:
    """k with m = 3^k, or None"""
    if m < 1:
        return None
    k = 0
    while m % 3 == 0:
        m //= 3
        k += 1
    return k if m == 1 and k > 0 else None


def exceedance_cluster_set(pmap: PiecewiseMap, level: int, q: int,
                           threshold_set: Optional[IntervalSet] = None) -> IntervalSet:
    """A_{q,L}: points of U whose next q iterates all avoid U

    Built as A_0 = U, A_i = A_{i-1} minus T^-i(U), each preimage taken
    only inside A_{i-1}.
    """
    if q < 0:
        raise ValidationException(f"Number of gaps must be nonnegative, got {q}", "INVALID_GAPS")
    threshold = cantor_approx(level) if threshold_set is None else threshold_set
    cluster = threshold
    for i in range(1, q + 1):
        if not cluster:
            break
        returning = iterated_preimage(threshold, pmap, i, window=cluster)
        cluster = cluster.difference(returning)
        logger.debug(f"{pmap.map_id} L={level} step {i}/{q}: {cluster.component_count()} components")
    return cluster


def obrien_theta(pmap: PiecewiseMap, level: int, q: int,
                 threshold_set: Optional[IntervalSet] = None) -> TheoryResult:
    """Exact O'Brien ratio mu(A_{q,L}) / mu(U)"""
    threshold = cantor_approx(level) if threshold_set is None else threshold_set
    with PerformanceLogger(f"obrien_theta {pmap.map_id} L={level} q={q}") as timer:
        cluster = exceedance_cluster_set(pmap, level, q, threshold)
    log_exact_operation(f"A_(q={q},L={level}) for {pmap.map_id}", timer.duration, cluster.component_count())
    mu_u = threshold.measure()
    if mu_u == 0:
        raise ValidationException("Threshold set has measure zero", "EMPTY_THRESHOLD")
    mu_a = cluster.measure()
    return TheoryResult(
        map_id=pmap.map_id,
        level=level,
        q=q,
        theta_exact=mu_a / mu_u,
        mu_u=mu_u,
        mu_a=mu_a,
        components=cluster.component_count(),
    )


def q_schedule(m: int, n: int) -> int:
    """Least q with m^q >= 3^n, by integer comparison"""
    if m < 2:
        raise ValidationException(f"Multiplier must be at least 2, got {m}", "INVALID_MULTIPLIER")
    if n < 1:
        raise ValidationException(f"Level must be at least 1, got {n}", "INVALID_LEVEL")
    k = power_of_three_exponent(m)
    if k is not None:
        raise ScheduleException(
            f"m={m} is 3^{k}; use k_schedule({k}, n) instead", "POWER_OF_THREE", {'k': k}
        )
    target = 3 ** n
    q, power = 0, 1
    while power < target:
        power *= m
        q += 1
    return q


def k_schedule(k: int, n: int) -> Tuple[int, int]:
    """(L, q) = (n+k-1, floor((n+k-1)/k)) for m = 3^k"""
    if k < 1 or n < 1:
        raise ValidationException("k and n must be at least 1", "INVALID_SCHEDULE")
    level = n + k - 1
    return level, level // k


def w_schedule(tau: Fraction, level: int) -> int:
    """floor(tau * 3^L / 2^L)"""
    tau = Fraction(tau)
    if tau <= 0 or level < 0:
        raise ValidationException("tau must be positive and L nonnegative", "INVALID_SCHEDULE")
    return math.floor(tau * 3 ** level / 2 ** level)


def schedule(m: int, n: int, tau: Fraction = Fraction(1)) -> Schedule:
    """Threshold level, gap count and window length for T = m x mod 1"""
    k = power_of_three_exponent(m)
    if k is None:
        level, q = n, q_schedule(m, n)
    else:
        level, q = k_schedule(k, n)
    return Schedule(n=n, level=level, q_n=q, w_n=w_schedule(tau, level), tau=Fraction(tau))


def theoretical_ei(map_id: str, ifs=None, k: Optional[int] = None) -> Fraction:
    """Closed-form extremal index where one is known"""
    name, _, argument = map_id.partition(':')
    if name == "mx_mod1" and argument.isdigit():
        m = int(argument)
        power = power_of_three_exponent(m)
        if power is None:
            return Fraction(1)
        return 1 - Fraction(2 ** power, 3 ** power)
    if name == "mixed_linear":
        return Fraction(2, 3)
    if name == "general_ifs":
        from .ifs_cantor import ifs_limit_theta
        if ifs is None:
            raise NoClosedFormException("general_ifs needs an IFS", "NO_CLOSED_FORM")
        k = int(argument) if argument else k
        if k is None:
            raise NoClosedFormException("general_ifs needs k", "NO_CLOSED_FORM")
        return ifs_limit_theta(ifs, k)
    raise NoClosedFormException(
        f"No closed-form extremal index for {map_id!r}; estimate it by simulation",
        "NO_CLOSED_FORM",
        {'map_id': map_id}
    )


def _copies_meet_component(component: Tuple[Fraction, Fraction], fine: IntervalSet,
                           scale: int) -> bool:
    """Does the interior of a C_n component meet fine and T^-q(fine)?"""
    lo, hi = component
    own = fine.clip(lo, hi, closed=True)
    if not own:
        return False
    for k in range(max(0, math.floor(lo * scale)), min(scale - 1, math.ceil(hi * scale) - 1) + 1):
        local = fine.clip(max(Fraction(0), lo * scale - k), min(Fraction(1), hi * scale - k), closed=True)
        copy = [((a + k) / scale, (b + k) / scale) for a, b in local]
        i = j = 0
        while i < len(own) and j < len(copy):
            start = max(own[i][0], copy[j][0])
            end = min(own[i][1], copy[j][1])
            if start <= end and start < hi and end > lo:
                return True
            if own[i][1] < copy[j][1]:
                i += 1
            else:
                j += 1
    return False


def covering_counts(m: int, q: int, n: int, d: Optional[int] = None) -> Tuple[int, int]:
    """(N_star, N_refined): components of C_n whose interior meets
    C_n with T^-q(C_n), respectively C_d with T^-q(C_d), closed contact included"""
    d = n if d is None else d
    if d < n:
        raise ValidationException(f"Refinement depth {d} is below n={n}", "INVALID_DEPTH")
    coarse = cantor_approx(n)
    fine = cantor_approx(d)
    scale = m ** q
    n_star = sum(1 for component in coarse.pairs() if _copies_meet_component(component, coarse, scale))
    if d == n:
        return n_star, n_star
    n_refined = sum(1 for component in coarse.pairs() if _copies_meet_component(component, fine, scale))
    logger.debug(f"covering counts m={m} q={q} n={n} d={d}: {n_star}, {n_refined}")
    return n_star, n_refined


def return_set(m: int, q: int, n: int) -> IntervalSet:
    """C_n intersected with T^-q(C_n) for T = m x mod 1"""
    cantor = cantor_approx(n)
    return preimage_mod1_affine(cantor, m, q, window=cantor)


def dim_estimate_from_counts(counts: Sequence[Tuple[int, int]]) -> float:
    """Least-squares slope of log N against n log 3 for (n, N) pairs"""
    points = [(n, count) for n, count in counts if count > 0]
    if len(points) < 2 or len({n for n, _ in points}) < 2:
        raise ValidationException("Dimension estimate needs counts at two or more levels", "TOO_FEW_COUNTS")
    x = np.array([n * math.log(3.0) for n, _ in points])
    y = np.array([math.log(count) for _, count in points])
    slope, _intercept = np.polyfit(x, y, 1)
    return float(slope)


def incompatible_theta_sequence(m: int, levels: Sequence[int]) -> List[TheoryResult]:
    """obrien_theta along the q_n schedule for m x mod 1"""
    pmap = mx_mod1(m)
    results = []
    for n in levels:
        plan = schedule(m, n)
        results.append(obrien_theta(pmap, plan.level, plan.q_n))
    return results
