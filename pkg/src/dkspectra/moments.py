"""Exact moments of tensor-power random variables on ``G^N``.

The normalized trace on ``M(V)^{(x)N}`` is the product state, so for
matrices ``T_1, ..., T_m`` depending polynomially on formal variables::

    phi(T_1^{(x)N} ... T_m^{(x)N}) = f(t)^N,   f(t) = Tr[T_1(t) ... T_m(t)] / |V|.

Each random variable handled here is a coefficient of such a tensor power:
``A^[N,k]`` is the ``u^k`` coefficient of ``(sum_h u^h D^[h])^{(x)N}`` because
distances in ``G^N`` add coordinatewise, ``A^(N,n)`` is the ``u^n``
coefficient of ``(I + uA)^{(x)N}``, and so on.  Moments are therefore single
coefficients of ``f^N``, computed without ever building ``G^N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .graphs import Graph, distance_k_matrix, mean_degree
from .poly import BinomialPowers, ScaledValue, TruncPoly, rational_sqrt


@dataclass(frozen=True, order=True)
class Partition:
    """Partition of ``k`` as multiplicities: ``parts[h-1]`` copies of ``h``."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(j) for j in self.parts)
        if any(j < 0 for j in parts):
            raise ValueError(f"negative multiplicity in {parts}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    @property
    def k(self) -> int:
        return sum(h * j for h, j in enumerate(self.parts, 1))

    @property
    def length(self) -> int:
        """Number of nonzero parts ``J``."""
        return sum(self.parts)

    @property
    def is_elementary(self) -> bool:
        """True for ``(k, 0, 0, ...)``, i.e. ``1 + 1 + ... + 1``."""
        return len(self.parts) <= 1

    def multiplicity(self, h: int) -> int:
        return self.parts[h - 1] if 1 <= h <= len(self.parts) else 0

    def summands(self) -> list[int]:
        """Parts as a non-increasing list, e.g. ``(1, 1)`` -> ``[2, 1]``."""
        return [h for h in range(len(self.parts), 0, -1) for _ in range(self.parts[h - 1])]

    def label(self) -> str:
        return "+".join(str(h) for h in self.summands()) or "0"

    def __str__(self) -> str:
        return self.label()


def partitions(k: int) -> list[Partition]:
    """All partitions of ``k``, descending lexicographic on multiplicities.

    The first entry is always ``(k,)`` (all ones).
    """
    if k < 1:
        raise ValueError("k must be positive")
    out: list[tuple[int, ...]] = []

    def rec(h: int, remaining: int, prefix: list[int]) -> None:
        if h > k:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for j in range(remaining // h, -1, -1):
            prefix.append(j)
            rec(h + 1, remaining - h * j, prefix)
            prefix.pop()

    rec(1, k, [])
    return [Partition(p) for p in out]


@dataclass(frozen=True)
class PencilTerm:
    """One summand ``scale * prod(t_var**power) * matrix`` of a slot matrix ``T_j(t)``."""

    monomial: tuple[tuple[int, int], ...]
    matrix: np.ndarray = field(compare=False)
    scale: Fraction = Fraction(1)


Pencil = Sequence[Sequence[PencilTerm]]


def factor_trace_poly(g: Graph, pencil: Pencil, caps: Sequence[int]) -> TruncPoly:
    """``Tr[T_1(t) ... T_m(t)] / |V|`` as a truncated polynomial.

    ``pencil[j]`` lists the terms of ``T_j``.  Terms are expanded by a depth
    first walk over slots that shares prefix products; branches whose
    exponents leave the caps are cut.
    """
    n = g.vertex_count
    caps = tuple(caps)
    for slot in pencil:
        for term in slot:
            if term.matrix.shape != (n, n):
                raise ValueError(f"pencil matrix shape {term.matrix.shape} does not match |V|={n}")
    bound = n
    for slot in pencil:
        bound *= max((int(np.abs(t.matrix).sum(axis=1).max()) for t in slot), default=0) or 1
    dtype = np.int64 if bound < 2**62 else object
    slots = [[(t.monomial, t.matrix.astype(dtype), Fraction(t.scale)) for t in slot] for slot in pencil]

    acc: dict[tuple[int, ...], Fraction] = {}
    exps = [0] * len(caps)
    m = len(slots)

    def walk(j: int, prod_mat: np.ndarray, scale: Fraction) -> None:
        last = j == m - 1
        for mono, mat, s in slots[j]:
            ok = True
            for var, p in mono:
                exps[var] += p
                if exps[var] > caps[var]:
                    ok = False
            if ok:
                if last:
                    tr = int((prod_mat * mat.T).sum())
                    if tr:
                        key = tuple(exps)
                        acc[key] = acc.get(key, Fraction(0)) + scale * s * tr
                else:
                    walk(j + 1, prod_mat @ mat, scale * s)
            for var, p in mono:
                exps[var] -= p

    if m == 0:
        acc[tuple(exps)] = Fraction(n)
    else:
        walk(0, np.eye(n, dtype=dtype), Fraction(1))
    return TruncPoly.from_terms(caps, {e: v / n for e, v in acc.items() if v})


@dataclass(frozen=True)
class MomentResult:
    """Exact moment ``raw`` and its normalization ``raw / N**(n_half/2)``."""

    raw: ScaledValue
    N: int
    order: int
    m: int
    n_half: int

    @property
    def normalized(self) -> float:
        whole, odd = divmod(self.n_half, 2)
        v = float(self.raw.q / Fraction(self.N) ** whole)
        if self.raw.e:
            v *= math.sqrt(self.raw.c)
        if odd:
            v /= math.sqrt(self.N)
        return v

    @property
    def normalized_exact(self) -> Fraction | None:
        """The normalized moment as a rational, or None when it is irrational."""
        q = self.raw.q
        if q == 0:
            return Fraction(0)
        square = q * q * self.raw.c**self.raw.e / Fraction(self.N) ** self.n_half
        r = rational_sqrt(square)
        if r is None:
            return None
        return r if q > 0 else -r


def _result(raw: Fraction | ScaledValue, N: int, order: int, m: int, n_half: int, c: Fraction) -> MomentResult:
    if not isinstance(raw, ScaledValue):
        raw = ScaledValue(raw, 0, c)
    return MomentResult(raw, N, order, m, n_half)


def _check_positive(**kw: int) -> None:
    for name, v in kw.items():
        if v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v}")


@lru_cache(maxsize=256)
def _distance_powers(g: Graph, k: int, m: int) -> BinomialPowers:
    top = min(k, g.diameter)
    pencil = [
        [PencilTerm(((j, h),) if h else (), distance_k_matrix(g, h)) for h in range(top + 1)]
        for j in range(m)
    ]
    return BinomialPowers(factor_trace_poly(g, pencil, (k,) * m))


@lru_cache(maxsize=256)
def _elementary_powers(g: Graph, n: int, m: int) -> BinomialPowers:
    eye = np.eye(g.vertex_count, dtype=np.int64)
    pencil = [[PencilTerm((), eye), PencilTerm(((j, 1),), g.adjacency)] for j in range(m)]
    return BinomialPowers(factor_trace_poly(g, pencil, (n,) * m))


@lru_cache(maxsize=256)
def _partition_powers(g: Graph, lam: Partition, m: int) -> BinomialPowers:
    used = [h for h in range(1, len(lam.parts) + 1) if lam.multiplicity(h)]
    eye = np.eye(g.vertex_count, dtype=np.int64)
    pencil = []
    for j in range(m):
        slot = [PencilTerm((), eye)]
        for i, h in enumerate(used):
            slot.append(PencilTerm(((j * len(used) + i, 1),), distance_k_matrix(g, h)))
        pencil.append(slot)
    caps = tuple(lam.multiplicity(h) for _ in range(m) for h in used)
    return BinomialPowers(factor_trace_poly(g, pencil, caps))


@lru_cache(maxsize=256)
def _z_powers(g: Graph, n: int, m: int) -> BinomialPowers:
    # t_j carries A (the sqrt(c) of b is restored by the caller), s_j carries
    # b^2 - 1 = (|V| A^2 - 2|E| I) / (2|E|).
    v, e2 = g.vertex_count, 2 * g.edge_count
    eye = np.eye(v, dtype=np.int64)
    y = v * (g.adjacency @ g.adjacency) - e2 * eye
    pencil = [
        [
            PencilTerm((), eye),
            PencilTerm(((2 * j, 1),), g.adjacency),
            PencilTerm(((2 * j + 1, 1),), y, Fraction(1, e2)),
        ]
        for j in range(m)
    ]
    return BinomialPowers(factor_trace_poly(g, pencil, (n - 1, 1) * m))


def moment_distance_k(g: Graph, N: int, k: int, m: int) -> MomentResult:
    """``phi((A^[N,k])^m)``, normalized by ``N**(k m / 2)``."""
    _check_positive(N=N, m=m)
    if k < 0:
        raise ValueError("k must be non-negative")
    c = mean_degree(g)
    if k == 0:
        return _result(Fraction(1), N, 0, m, 0, c)
    if k > N * g.diameter:
        return _result(Fraction(0), N, k, m, k * m, c)
    raw = _distance_powers(g, k, m).coeff(N, (k,) * m)
    return _result(raw, N, k, m, k * m, c)


def moment_elementary(g: Graph, N: int, n: int, m: int) -> MomentResult:
    """``phi((A^(N,n))^m)``, normalized by ``N**(n m / 2)``."""
    _check_positive(N=N, n=n, m=m)
    if n > N:
        raise ValueError(f"elementary sum needs n <= N, got n={n}, N={N}")
    raw = _elementary_powers(g, n, m).coeff(N, (n,) * m)
    return _result(raw, N, n, m, n * m, mean_degree(g))


def moment_partition(g: Graph, N: int, lam: Partition, m: int) -> MomentResult:
    """``phi(C(lam)^m)``, normalized by ``N**(k m / 2)`` with ``k = lam.k``."""
    _check_positive(N=N, m=m)
    k = lam.k
    c = mean_degree(g)
    if k == 0:
        return _result(Fraction(1), N, 0, m, 0, c)
    if len(lam.parts) > g.diameter or lam.length > N:
        return _result(Fraction(0), N, k, m, k * m, c)
    used = tuple(j for j in lam.parts if j)
    raw = _partition_powers(g, lam, m).coeff(N, used * m)
    return _result(raw, N, k, m, k * m, c)


def moment_z(g: Graph, N: int, n: int, m: int) -> MomentResult:
    """``phi(F^(N,n)(b^2-1)^m)`` with ``b = A / sqrt(c)``.

    The normalized value is the ``m``-th moment of
    ``z_nN = F^(N,n)(b^2-1) / N**((n+1)/2)``.
    """
    _check_positive(N=N, n=n, m=m)
    if n > N:
        raise ValueError(f"z_nN needs n <= N, got n={n}, N={N}")
    c = mean_degree(g)
    coeff = _z_powers(g, n, m).coeff(N, (n - 1, 1) * m)
    raw = ScaledValue.from_half_power(coeff, -(n - 1) * m, c)
    return _result(raw, N, n, m, (n + 1) * m, c)


def moment_B(g: Graph, N: int, n: int, m: int) -> MomentResult:
    """Moments of ``B_nN = n! b^(N,n) / N**(n/2)`` with ``b = A / sqrt(c)``."""
    elem = moment_elementary(g, N, n, m)
    c = elem.raw.c
    raw = ScaledValue.from_half_power(elem.raw.q * math.factorial(n) ** m, -n * m, c)
    return _result(raw, N, n, m, n * m, c)


def moment_lln(g: Graph, N: int, m: int) -> MomentResult:
    """Moments of ``b^(N,1) / N``; these tend to ``phi(b)**m = 0``."""
    elem = moment_elementary(g, N, 1, m)
    raw = ScaledValue.from_half_power(elem.raw.q, -m, elem.raw.c)
    return _result(raw, N, 1, m, 2 * m, elem.raw.c)
