"""Brute-force ground truth on the explicit product graph ``G^N``.

Product vertices ``(x_1, ..., x_N)`` are ranked in mixed radix with the first
coordinate most significant, which matches ``numpy.kron`` ordering: the
matrix ``M_1 (x) ... (x) M_N`` acts on coordinate ``i`` through ``M_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, Mapping, Sequence

import numpy as np

from .graphs import Graph, bfs_distances, distance_k_matrix, mean_degree
from .moments import Partition

DEFAULT_CEILING = 4096
BFS_CHECK_LIMIT = 512
_EPS = np.finfo(float).eps / 4


class ExplicitSizeError(ValueError):
    pass


class JacobiError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def _check_size(g: Graph, N: int, ceiling: int | None) -> int:
    if N < 1:
        raise ValueError("N must be positive")
    ceiling = DEFAULT_CEILING if ceiling is None else ceiling
    dim = g.vertex_count**N
    if dim > ceiling:
        raise ExplicitSizeError(f"|V|^N = {g.vertex_count}^{N} = {dim} exceeds the explicit ceiling {ceiling}")
    return dim


def rank_vertex(coords: Sequence[int], base: int) -> int:
    r = 0
    for x in coords:
        if not 0 <= x < base:
            raise ValueError(f"coordinate {x} out of range 0..{base - 1}")
        r = r * base + x
    return r


def unrank_vertex(r: int, base: int, N: int) -> tuple[int, ...]:
    out = []
    for _ in range(N):
        r, x = divmod(r, base)
        out.append(x)
    return tuple(reversed(out))


def product_distance(dt: np.ndarray, x: Sequence[int], y: Sequence[int]) -> int:
    """Graph distance in ``G^N``: the sum of coordinate distances."""
    if len(x) != len(y):
        raise ValueError(f"product vertices of different lengths {len(x)} and {len(y)}")
    n = dt.shape[0]
    for xi, yi in zip(x, y):
        if not (0 <= xi < n and 0 <= yi < n):
            raise ValueError(f"coordinate pair ({xi}, {yi}) out of range 0..{n - 1}")
    return int(sum(dt[xi, yi] for xi, yi in zip(x, y)))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def placement(N: int, slots: Mapping[int, np.ndarray], eye: np.ndarray) -> np.ndarray:
    """``1 (x) ... (x) M (x) ... (x) 1`` with ``slots[i]`` at coordinate ``i``."""
    return kron_all([slots.get(i, eye) for i in range(N)])


def arrangements(N: int, counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Label sequences of length ``N`` with ``counts[l-1]`` copies of label ``l``; 0 fills the rest."""
    need = sum(counts)
    if need > N:
        return

    def rec(pos: int, left: list[int], prefix: list[int]) -> Iterator[tuple[int, ...]]:
        if pos == N:
            yield tuple(prefix)
            return
        spare = N - pos - sum(left)
        if spare > 0:
            prefix.append(0)
            yield from rec(pos + 1, left, prefix)
            prefix.pop()
        for i, c in enumerate(left):
            if c:
                left[i] -= 1
                prefix.append(i + 1)
                yield from rec(pos + 1, left, prefix)
                prefix.pop()
                left[i] += 1

    yield from rec(0, list(counts), [])


def arrangement_sum(N: int, mats: Sequence[np.ndarray], counts: Sequence[int], eye: np.ndarray) -> np.ndarray:
    """Sum over all arrangements of ``counts[l]`` copies of ``mats[l]`` in an ``N``-fold tensor product."""
    dim = eye.shape[0] ** N
    out = np.zeros((dim, dim), dtype=np.result_type(eye, *mats))
    for labels in arrangements(N, counts):
        out += kron_all([eye if l == 0 else mats[l - 1] for l in labels])
    return out


def product_distance_matrix(g: Graph, N: int, ceiling: int | None = None) -> np.ndarray:
    """All-pairs distances of ``G^N`` via coordinatewise sums."""
    _check_size(g, N, ceiling)
    ones = np.ones((g.vertex_count, g.vertex_count), dtype=np.int64)
    d = g.distances
    total = None
    for i in range(N):
        term = placement(N, {i: d}, ones)
        total = term if total is None else total + term
    return total


def product_adjacency(g: Graph, N: int, ceiling: int | None = None) -> np.ndarray:
    """Adjacency of the Cartesian power: ``sum_i 1 (x) .. A .. (x) 1``."""
    _check_size(g, N, ceiling)
    eye = np.eye(g.vertex_count, dtype=np.int64)
    return sum(placement(N, {i: g.adjacency}, eye) for i in range(N))


def product_bfs_distances(g: Graph, N: int, ceiling: int | None = None) -> np.ndarray:
    adj = product_adjacency(g, N, ceiling)
    neighbours = [np.flatnonzero(row).tolist() for row in adj]
    return bfs_distances(neighbours)


def build_distance_k_adjacency(g: Graph, N: int, k: int, ceiling: int | None = None) -> np.ndarray:
    """Adjacency matrix of the distance-``k`` graph of ``G^N``.

    For products up to ``BFS_CHECK_LIMIT`` vertices the additive distance is
    also checked against BFS on the explicit product graph.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    dim = _check_size(g, N, ceiling)
    dist = product_distance_matrix(g, N, ceiling)
    if dim <= BFS_CHECK_LIMIT:
        bfs = product_bfs_distances(g, N, ceiling)
        if not np.array_equal(bfs, dist):
            raise AssertionError("additive product distance disagrees with BFS on the explicit product")
    return (dist == k).astype(np.int64)


def build_elementary_sum(g: Graph, N: int, n: int, ceiling: int | None = None) -> np.ndarray:
    """``A^(N,n)``: sum over ``n``-subsets of coordinates carrying ``A``."""
    _check_size(g, N, ceiling)
    if not 1 <= n <= N:
        raise ValueError(f"elementary sum needs 1 <= n <= N, got n={n}, N={N}")
    eye = np.eye(g.vertex_count, dtype=np.int64)
    return arrangement_sum(N, [g.adjacency], [n], eye)


def build_partition_term(g: Graph, N: int, lam: Partition, ceiling: int | None = None) -> np.ndarray:
    """``C(lam)``: every arrangement of ``j_h`` copies of ``D^[h]`` over the coordinates."""
    _check_size(g, N, ceiling)
    eye = np.eye(g.vertex_count, dtype=np.int64)
    mats = [distance_k_matrix(g, h) for h in range(1, len(lam.parts) + 1)]
    return arrangement_sum(N, mats, list(lam.parts), eye)


def partition_term_by_pairs(g: Graph, N: int, lam: Partition, ceiling: int | None = None) -> np.ndarray:
    """``C(lam)`` characterised pairwise: 1 where the multiset of nonzero coordinate distances is ``lam``."""
    _check_size(g, N, ceiling)
    ones = np.ones((g.vertex_count, g.vertex_count), dtype=np.int64)
    coord = [placement(N, {i: g.distances}, ones) for i in range(N)]
    top = max(g.diameter, len(lam.parts))
    ok = None
    for h in range(1, top + 1):
        hits = sum((c == h).astype(np.int64) for c in coord)
        cond = hits == lam.multiplicity(h)
        ok = cond if ok is None else ok & cond
    return ok.astype(np.int64)


def trace_moment(M: np.ndarray, m: int) -> Fraction:
    """``Tr(M**m) / dim`` with exact integer matrix powers."""
    if m < 1:
        raise ValueError("m must be positive")
    M = np.asarray(M)
    dim = M.shape[0]
    row = int(np.abs(M).sum(axis=1).max()) if dim else 0
    exact = M.astype(np.int64) if dim * max(row, 1) ** m < 2**62 else M.astype(object)
    p = exact
    for _ in range(m - 1):
        p = p @ exact
    return Fraction(int(np.trace(p)), dim)


@dataclass(frozen=True)
class ScaledMatrix:
    """Rational matrix ``scale * c**(half/2) * mat`` with integer ``mat``."""

    mat: np.ndarray
    scale: Fraction
    half: int
    c: Fraction

    def factor(self, half: int) -> Fraction:
        """Rational multiplier of ``mat`` once the c-power is moved to ``half``."""
        diff = self.half - half
        if diff % 2:
            raise ValueError("cannot align half-powers of different parity")
        return self.scale * self.c ** (diff // 2)

    def rational(self, half: int) -> np.ndarray:
        """Entries as Fractions after moving the c-power to ``half``."""
        factor = self.factor(half)
        return np.vectorize(lambda x: factor * int(x), otypes=[object])(self.mat)

    def __matmul__(self, other: ScaledMatrix) -> ScaledMatrix:
        return ScaledMatrix(self.mat @ other.mat, self.scale * other.scale, self.half + other.half, self.c)


def elementary_b(g: Graph, N: int, n: int, ceiling: int | None = None) -> ScaledMatrix:
    """``b^(N,n)`` with ``b = A / sqrt(c)``; ``n = 0`` gives the identity."""
    c = mean_degree(g)
    if n == 0:
        _check_size(g, N, ceiling)
        return ScaledMatrix(np.eye(g.vertex_count**N, dtype=np.int64), Fraction(1), 0, c)
    return ScaledMatrix(build_elementary_sum(g, N, n, ceiling), Fraction(1), -n, c)


def build_F_centered(g: Graph, N: int, n: int, ceiling: int | None = None) -> ScaledMatrix:
    """``F^(N,n)(b^2 - 1)``: ``n-1`` copies of ``b`` and one ``b^2 - 1`` over all arrangements."""
    _check_size(g, N, ceiling)
    if not 1 <= n <= N:
        raise ValueError(f"F^(N,n) needs 1 <= n <= N, got n={n}, N={N}")
    c = mean_degree(g)
    v, e2 = g.vertex_count, 2 * g.edge_count
    eye = np.eye(v, dtype=np.int64)
    y = v * (g.adjacency @ g.adjacency) - e2 * eye
    mat = arrangement_sum(N, [g.adjacency, y], [n - 1, 1], eye)
    return ScaledMatrix(mat, Fraction(1, e2), -(n - 1), c)


def identity38_residual(g: Graph, N: int, n: int, ceiling: int | None = None) -> Fraction:
    """Largest entry of ``b1 bn - (n+1) b_{n+1} - (N-n+1) b_{n-1} - F(b^2-1)``.

    Exact; zero when the recursion identity holds.  Every term is brought to
    the same power of ``c`` and a common denominator, so the comparison runs
    on integer matrices.
    """
    if not 1 <= n < N:
        raise ValueError(f"identity needs 1 <= n < N, got n={n}, N={N}")
    target = -(n + 1)
    terms = [
        (elementary_b(g, N, 1, ceiling) @ elementary_b(g, N, n, ceiling), 1),
        (elementary_b(g, N, n + 1, ceiling), -(n + 1)),
        (elementary_b(g, N, n - 1, ceiling), -(N - n + 1)),
        (build_F_centered(g, N, n, ceiling), -1),
    ]
    factors = [sm.factor(target) * w for sm, w in terms]
    den = math.lcm(*(f.denominator for f in factors))
    bound = sum(abs(f) * den * int(np.abs(sm.mat).max(initial=0)) for f, (sm, _) in zip(factors, terms))
    dtype = np.int64 if bound < 2**62 else object
    diff = sum(sm.mat.astype(dtype) * int(f * den) for f, (sm, _) in zip(factors, terms))
    return Fraction(int(np.abs(diff).max(initial=0)), den)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt((off * off).sum()))


def jacobi_eigenvalues(M: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> list[float]:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of one round touch disjoint rows and can be applied
    together.  Stops when the off-diagonal Frobenius norm drops below ``tol``.
    """
    a = np.array(M, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=0):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]
    rounds = _round_robin(n) if n > 1 else []
    for _ in range(max_sweeps):
        if _off_norm(a) < tol:
            return sorted(float(x) for x in np.diag(a))
        for p, q in rounds:
            apq = a[p, q]
            # Entries already negligible against the diagonal are dropped
            # rather than rotated, which also keeps theta finite.
            negligible = np.abs(apq) <= _EPS * np.sqrt(np.abs(a[p, p] * a[q, q]))
            a[p[negligible], q[negligible]] = 0.0
            a[q[negligible], p[negligible]] = 0.0
            live = (apq != 0) & ~negligible
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            theta = (a[q, q] - a[p, p]) / (2 * apq)
            huge = np.abs(theta) > 1e150
            safe = np.where(huge, 1.0, theta)
            t = np.where(safe >= 0, 1.0, -1.0) / (np.abs(safe) + np.sqrt(safe * safe + 1))
            t = np.where(huge, 0.5 / np.where(huge, theta, 1.0), t)
            cs = 1 / np.sqrt(t * t + 1)
            sn = t * cs
            colp, colq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cs * colp - sn * colq
            a[:, q] = sn * colp + cs * colq
            rowp, rowq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = cs[:, None] * rowp - sn[:, None] * rowq
            a[q, :] = sn[:, None] * rowp + cs[:, None] * rowq
            a[p, q] = 0.0
            a[q, p] = 0.0
    residual = _off_norm(a)
    if residual < tol:
        return sorted(float(x) for x in np.diag(a))
    raise JacobiError(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {residual:.3e})", residual)


@dataclass(frozen=True)
class Histogram:
    """Bin counts of scaled eigenvalues.

    Bins are half-open ``[lo, hi)`` except the last, which includes its right
    edge.  Values outside the range go to ``underflow``/``overflow``, so
    ``sum(counts) + underflow + overflow == total``.
    """

    edges: tuple[float, ...]
    counts: tuple[int, ...]
    total: int
    underflow: int = 0
    overflow: int = 0

    def as_dict(self) -> dict:
        return {
            "edges": list(self.edges),
            "counts": list(self.counts),
            "total": self.total,
            "underflow": self.underflow,
            "overflow": self.overflow,
        }


def spectral_histogram(eigs: Sequence[float], scale: float, bins: int, lo: float, hi: float) -> Histogram:
    if bins < 1:
        raise ValueError("bins must be positive")
    if not hi > lo:
        raise ValueError("histogram range must satisfy lo < hi")
    x = np.asarray(list(eigs), dtype=float) / scale
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    return Histogram(
        tuple(float(e) for e in edges),
        tuple(int(c) for c in counts),
        int(x.size),
        int((x < lo).sum()),
        int((x > hi).sum()),
    )


def edge_count_of(M: np.ndarray) -> int:
    return int(np.asarray(M).sum()) // 2
