"""
Cantor sets generated by affine iterated function systems
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from scipy.optimize import brentq

from ..dynamics.maps import AffineBranch, Number, PiecewiseMap, eval_map, quadratic_compatible
from ..dynamics.observables import SURVIVOR_QUADRATIC, escape_time
from ..exact.interval_set import IntervalSet, format_rational
from ..models.schemas import TheoryResult
from ..utils.error_handler import ConfigException, ValidationException
from ..utils.logging_config import get_logger
from ..utils.resource_manager import check_depth

logger = get_logger('theory')


@dataclass(frozen=True, order=True)
class Contraction:
    """f(x) = ratio * x + offset, increasing"""
    offset: Fraction
    ratio: Fraction

    @property
    def image(self) -> Tuple[Fraction, Fraction]:
        return self.offset, self.offset + self.ratio

    def __call__(self, x: Fraction) -> Fraction:
        return self.ratio * x + self.offset


@dataclass(frozen=True)
class AffineIFS:
    """Contractions with pairwise disjoint images inside [0,1], sorted by offset"""
    contractions: Tuple[Contraction, ...]
    name: str = "ifs"

    def __post_init__(self):
        if len(self.contractions) < 2:
            raise ValidationException("An IFS needs at least two contractions", "INVALID_IFS")
        ordered = tuple(sorted(Contraction(Fraction(c.offset), Fraction(c.ratio)) for c in self.contractions))
        for c in ordered:
            if not 0 < c.ratio < 1:
                raise ValidationException(f"Contraction ratio {c.ratio} is not in (0,1)", "INVALID_IFS")
            lo, hi = c.image
            if lo < 0 or hi > 1:
                raise ValidationException(
                    f"Image [{format_rational(lo)}, {format_rational(hi)}] leaves [0,1]", "INVALID_IFS"
                )
        for left, right in zip(ordered, ordered[1:]):
            if left.image[1] >= right.image[0]:
                raise ValidationException("Contraction images must be pairwise disjoint", "INVALID_IFS")
        object.__setattr__(self, 'contractions', ordered)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[Number, Number]], name: str = "ifs") -> 'AffineIFS':
        """Build from (ratio, offset) pairs"""
        return cls(tuple(Contraction(Fraction(offset), Fraction(ratio)) for ratio, offset in pairs), name)

    @property
    def ratio_sum(self) -> Fraction:
        return sum((c.ratio for c in self.contractions), Fraction(0))


TERNARY_IFS = AffineIFS.from_pairs([(Fraction(1, 3), 0), (Fraction(1, 3), Fraction(2, 3))], "ternary")


class SurvivorSpec:
    """Cached levels Lambda_0 contains Lambda_1 contains ... of an IFS"""

    def __init__(self, ifs: AffineIFS):
        self.ifs = ifs
        self._levels: List[IntervalSet] = [IntervalSet.unit()]

    def level(self, n: int) -> IntervalSet:
        if n < 0:
            raise ValidationException(f"Level must be nonnegative, got {n}", "INVALID_LEVEL")
        check_depth(n, "IFS level")
        while len(self._levels) <= n:
            previous = list(self._levels[-1].pairs())
            pieces = [
                (c(lo), c(hi))
                for c in self.ifs.contractions
                for lo, hi in previous
            ]
            self._levels.append(IntervalSet._from_sorted_pairs(pieces))
        return self._levels[n]


_SPECS: Dict[AffineIFS, SurvivorSpec] = {}


def _spec_for(ifs: AffineIFS) -> SurvivorSpec:
    if ifs not in _SPECS:
        _SPECS[ifs] = SurvivorSpec(ifs)
    return _SPECS[ifs]


def survivor_approx(ifs: AffineIFS, n: int) -> IntervalSet:
    """Union of f_w([0,1]) over words w of length n"""
    return _spec_for(ifs).level(n)


def survivor_measure(ifs: AffineIFS, n: int) -> Fraction:
    """(sum of ratios)^n; images are disjoint so every word adds its own length"""
    return ifs.ratio_sum ** n


def compatible_map(ifs: AffineIFS) -> PiecewiseMap:
    """Full-branch map: f_i^-1 on each image, increasing linear onto [0,1] on each gap"""
    branches = []
    cursor = Fraction(0)
    for c in ifs.contractions:
        lo, hi = c.image
        if lo > cursor:
            branches.append(AffineBranch(cursor, lo, 1 / (lo - cursor), -cursor / (lo - cursor)))
        branches.append(AffineBranch(lo, hi, 1 / c.ratio, -c.offset / c.ratio))
        cursor = hi
    if cursor < 1:
        branches.append(AffineBranch(cursor, 1, 1 / (1 - cursor), -cursor / (1 - cursor)))
    return PiecewiseMap(f"ifs_compatible:{ifs.name}", tuple(branches))


def compose_affine(pmap: PiecewiseMap, k: int) -> PiecewiseMap:
    """F^k for an exact piecewise-affine map with branches onto sub-intervals of [0,1]"""
    if k < 1:
        raise ValidationException(f"Iterate count must be at least 1, got {k}", "INVALID_ITERATE")
    if not pmap.is_exact_affine:
        raise ValidationException(f"{pmap.map_id} is not exactly affine", "UNSUPPORTED_MAP")
    branches = list(pmap.branches)
    for _ in range(k - 1):
        composed = []
        for inner in pmap.branches:
            for outer in branches:
                # inner first, then the (k-1)-fold map
                lo = max(inner.lo, (outer.lo - inner.intercept) / inner.slope)
                hi = min(inner.hi, (outer.hi - inner.intercept) / inner.slope)
                if inner.slope < 0:
                    lo = max(inner.lo, (outer.hi - inner.intercept) / inner.slope)
                    hi = min(inner.hi, (outer.lo - inner.intercept) / inner.slope)
                if lo < hi:
                    composed.append(AffineBranch(
                        lo, hi, outer.slope * inner.slope, outer.slope * inner.intercept + outer.intercept
                    ))
        branches = sorted(composed, key=lambda branch: branch.lo)
    return PiecewiseMap(f"{pmap.map_id}^{k}", tuple(branches), lebesgue_invariant=pmap.lebesgue_invariant)


def general_theta(ifs: AffineIFS, k: int, n: int) -> TheoryResult:
    """mu(Lambda_{n+k-1} minus Lambda_{n+2k-1}) / mu(Lambda_{n+k-1})"""
    if k < 1 or n < 1:
        raise ValidationException("k and n must be at least 1", "INVALID_SCHEDULE")
    level = n + k - 1
    outer = survivor_approx(ifs, level)
    inner = survivor_approx(ifs, level + k)
    cluster = outer.difference(inner)
    mu_u = outer.measure()
    mu_a = cluster.measure()
    return TheoryResult(
        map_id=f"general_ifs:{k}",
        level=level,
        q=level // k,
        theta_exact=mu_a / mu_u,
        mu_u=mu_u,
        mu_a=mu_a,
        components=cluster.component_count(),
    )


def ifs_limit_theta(ifs: AffineIFS, k: int) -> Fraction:
    """1 - (sum of ratios)^k"""
    return 1 - ifs.ratio_sum ** k


def similarity_dimension(ifs: AffineIFS) -> float:
    """d with sum of ratio_i^d = 1"""
    ratios = [float(c.ratio) for c in ifs.contractions]
    return float(brentq(lambda d: math.fsum(r ** d for r in ratios) - 1.0, 0.0, 1.0, xtol=1e-14))


def quadratic_survivor_observable(x: Number, cap: int = 100) -> int:
    """Escape time of g(x) = 6x(1-x)"""
    return escape_time(x, SURVIVOR_QUADRATIC, cap)


QUADRATIC_COMPATIBLE = quadratic_compatible()


def quadratic_compatible_map(x: Number) -> float:
    return eval_map(QUADRATIC_COMPATIBLE, x)


def load_ifs(path: Union[str, Path]) -> AffineIFS:
    """Read an IFS file: one 'ratio offset' contraction per line, rationals like 1/3"""
    path = Path(path)
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise ConfigException(f"Cannot read IFS file {path}: {e}", "INVALID_SPEC_FILE") from e
    pairs = []
    for line_number, raw in enumerate(lines, 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ConfigException(f"{path}:{line_number}: expected 'ratio offset'", "INVALID_SPEC_FILE")
        try:
            pairs.append((Fraction(tokens[0]), Fraction(tokens[1])))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigException(f"{path}:{line_number}: {e}", "INVALID_SPEC_FILE") from e
    try:
        return AffineIFS.from_pairs(pairs, name=path.stem)
    except ValidationException as e:
        raise ConfigException(f"{path}: {e.message}", "INVALID_SPEC_FILE") from e
