"""
Digraph IFS substitution matrices for Cantor / preimage intersections

Vertices are the affine maps g_s(x) = x/M + s/M, M = m^q, s in {-1..M},
labelled i = s + 2. An edge g -> h carries generator f_i when
h = f_i^-1 g f_j for some j, where f_1(x) = x/3 and f_2(x) = x/3 + 2/3.
In offsets this reads s* = 3s + 2[j=2] - 2M[i=2].
"""

import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .. import config
from ..exact.interval_set import IntervalSet, cantor_approx
from ..utils.error_handler import NonConvergenceException, ValidationException, validate_input
from ..utils.logging_config import PerformanceLogger, get_logger
from ..utils.resource_manager import check_matrix_rows

logger = get_logger('digraph')

# (i, j) generator pairs in the vertex relation h = f_i^-1 g f_j
GENERATOR_PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))


@dataclass(frozen=True, order=True)
class AffineVertex:
    """g(x) = x/M + s/M"""
    modulus: int
    s: int

    @property
    def label(self) -> int:
        return self.s + 2

    @property
    def ratio(self) -> Fraction:
        return Fraction(1, self.modulus)

    @property
    def offset(self) -> Fraction:
        return Fraction(self.s, self.modulus)

    def __call__(self, x: Fraction) -> Fraction:
        return (Fraction(x) + self.s) / self.modulus


def successor_offset(s: int, modulus: int, i: int, j: int) -> int:
    """Offset of f_i^-1 g_s f_j"""
    return 3 * s + (2 if j == 2 else 0) - (2 * modulus if i == 2 else 0)


@dataclass(frozen=True)
class SubstitutionMatrix:
    """0/1 CSR matrix with vertex labels"""
    matrix: sparse.csr_matrix
    labels: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entries(self) -> List[Tuple[int, int]]:
        """Nonzero (row, col) pairs, 1-based, sorted"""
        coo = self.matrix.tocoo()
        return sorted(zip((coo.row + 1).tolist(), (coo.col + 1).tolist()))

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).reshape(-1)

    def row_sum_histogram(self) -> Dict[int, int]:
        return dict(sorted(Counter(self.row_sums().astype(int).tolist()).items()))

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True)
class DigraphIFS:
    vertices: Tuple[AffineVertex, ...]
    edges: Tuple[Tuple[AffineVertex, AffineVertex, int], ...]

    def adjacency(self) -> SubstitutionMatrix:
        index = {vertex.s: position for position, vertex in enumerate(self.vertices)}
        dim = len(self.vertices)
        rows = [index[g.s] for g, h, _ in self.edges]
        cols = [index[h.s] for g, h, _ in self.edges]
        matrix = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(dim, dim)
        )
        matrix.sum_duplicates()
        matrix.data[:] = 1
        return SubstitutionMatrix(matrix, tuple(vertex.label for vertex in self.vertices))


def build_Nq(m: int, q: int) -> SubstitutionMatrix:
    """N^q of dimension m^q + 2 from the four index rules

    N[i, 3i-2], N[i, 3i-4], N[i, 3i-2M-4], N[i, 3i-2M-2] (1-based), each
    only when the column lies in range.
    """
    m = validate_input("m", m)
    q = validate_input("q", q)
    modulus = m ** q
    dim = modulus + 2
    check_matrix_rows(dim)
    i = np.arange(1, dim + 1, dtype=np.int64)
    # All four rules apply at every row; for m=3, q=1 the third one also
    # yields (3, 1), so N^1 has 8 entries rather than the usual 7 displayed
    rows, cols = [], []
    for shift in (2, 4, 2 * modulus + 4, 2 * modulus + 2):
        col = 3 * i - shift
        valid = (col >= 1) & (col <= dim)
        rows.append(i[valid] - 1)
        cols.append(col[valid] - 1)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    matrix = sparse.csr_matrix(
        (np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(dim, dim)
    )
    logger.debug(f"N^{q} for m={m}: dim {dim}, {matrix.nnz} entries")
    return SubstitutionMatrix(matrix, tuple(range(1, dim + 1)))


def _meets_shifted(cantor: IntervalSet, s: int, modulus: int) -> bool:
    """Closed contact of C_d with g_s(C_d)"""
    for lo, hi in cantor.pairs():
        if cantor.meets_interval((lo + s) / modulus, (hi + s) / modulus):
            return True
    return False


def mcclure_vertices(m: int, q: int, k: int, d: int) -> List[AffineVertex]:
    """Vertices reachable from g_k through the vertex relation, keeping maps
    h whose image h(C_d) touches C_d

    The closed-contact filter at depth d keeps every vertex meeting the
    limiting Cantor set, so the result is a superset of the exact vertex set.
    """
    modulus = m ** q
    if not -1 <= k <= modulus:
        raise ValidationException(f"Seed offset k={k} outside [-1, {modulus}]", "INVALID_SEED_VERTEX")
    cantor = cantor_approx(d)
    verdicts: Dict[int, bool] = {}

    def valid(s: int) -> bool:
        if s not in verdicts:
            verdicts[s] = _meets_shifted(cantor, s, modulus)
        return verdicts[s]

    if not valid(k):
        return []
    seen = {k}
    frontier = deque([k])
    while frontier:
        s = frontier.popleft()
        for i, j in GENERATOR_PAIRS:
            t = successor_offset(s, modulus, i, j)
            if -1 <= t <= modulus and t not in seen and valid(t):
                seen.add(t)
                frontier.append(t)
    return [AffineVertex(modulus, s) for s in sorted(seen)]


def build_digraph(vertices: Sequence[AffineVertex], m: int, q: int) -> DigraphIFS:
    modulus = m ** q
    present = {vertex.s: vertex for vertex in vertices}
    edges = []
    for vertex in sorted(present.values()):
        for i, j in GENERATOR_PAIRS:
            t = successor_offset(vertex.s, modulus, i, j)
            if t in present:
                edges.append((vertex, present[t], i))
    return DigraphIFS(tuple(sorted(present.values())), tuple(edges))


def build_Mqk(vertices: Sequence[AffineVertex], m: int, q: int) -> SubstitutionMatrix:
    """Adjacency of the McClure digraph; a principal submatrix of N^q"""
    if not vertices:
        return SubstitutionMatrix(sparse.csr_matrix((0, 0), dtype=np.int8), ())
    return build_digraph(vertices, m, q).adjacency()


def _perron_root(block: sparse.csr_matrix, tol: float, max_iter: int) -> float:
    """Spectral radius of an irreducible nonnegative block by power iteration on B + I"""
    size = block.shape[0]
    shifted = (block + sparse.identity(size, format='csr', dtype=float)).tocsr()
    x = np.full(size, 1.0 / size)
    previous = None
    stable = 0
    for _ in range(max_iter):
        y = shifted @ x
        total = y.sum()
        ratio = total / x.sum()
        quotients = y / x
        lower, upper = quotients.min(), quotients.max()
        if previous is not None and abs(ratio - previous) <= tol * ratio:
            stable += 1
        else:
            stable = 0
        if stable >= 10 and upper - lower <= tol * upper:
            return ratio - 1.0
        previous = ratio
        x = y / total
    raise NonConvergenceException(
        f"Power iteration did not converge in {max_iter} iterations (block of size {size})",
        (previous - 1.0, ratio - 1.0),
        {'block_size': size, 'max_iter': max_iter}
    )


def spectral_radius(matrix, tol: float = config.POWER_ITERATION_TOL,
                    max_iter: int = config.POWER_ITERATION_MAX_ITER) -> float:
    """Spectral radius of a nonnegative matrix, one strongly connected block at a time"""
    if isinstance(matrix, SubstitutionMatrix):
        matrix = matrix.matrix
    matrix = sparse.csr_matrix(matrix, dtype=float)
    size = matrix.shape[0]
    if size == 0 or matrix.nnz == 0:
        return 0.0
    with PerformanceLogger(f"spectral_radius dim={size}"):
        count, component = connected_components(matrix, directed=True, connection='strong')
        sizes = np.bincount(component, minlength=count)
        diagonal = matrix.diagonal()
        rho = 0.0
        singletons = sizes[component] == 1
        if singletons.any():
            rho = float(diagonal[singletons].max())
        order = np.argsort(component, kind='stable')
        bounds = np.concatenate(([0], np.cumsum(sizes)))
        for label in np.flatnonzero(sizes > 1):
            members = order[bounds[label]:bounds[label + 1]]
            block = matrix[members][:, members]
            rho = max(rho, _perron_root(block, tol, max_iter))
    return rho


def strip_threes(m: int) -> int:
    while m % 3 == 0:
        m //= 3
    return m


def dim_bound(m: int, q: int) -> float:
    """Upper bound on the box dimension of C intersected with T^-q(C)"""
    core = strip_threes(m)
    if core == 1:
        return math.log(2) / math.log(3)
    rho = spectral_radius(build_Nq(core, q))
    if rho <= 1.0:
        return 0.0
    return math.log(rho) / math.log(3)
