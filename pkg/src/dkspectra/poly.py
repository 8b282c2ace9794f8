"""Exact rational arithmetic on truncated multivariate polynomials.

A :class:`TruncPoly` in ``v`` variables with caps ``(c_1, ..., c_v)`` keeps
only monomials ``u^e`` with ``e_i <= c_i``; products discard everything above
the caps.  Coefficients are exact rationals, stored as an integer array over
one common denominator kept in lowest terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np


def _reduce(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    if den < 0:
        num, den = -num, -den
    flat = [int(x) for x in num.flat if x]
    if not flat:
        return np.zeros(num.shape, dtype=object), 1
    g = math.gcd(den, *flat)
    if g > 1:
        num = num // g
        den //= g
    return num, den


class TruncPoly:
    """Truncated polynomial with rational coefficients.

    Instances are immutable; every operation returns a new polynomial in
    canonical form (common denominator coprime to the numerators).
    """

    __slots__ = ("caps", "_num", "_den")

    def __init__(self, caps: Sequence[int], num: np.ndarray, den: int = 1):
        caps = tuple(int(c) for c in caps)
        if not caps or any(c < 0 for c in caps):
            raise ValueError(f"caps must be a non-empty sequence of non-negative ints, got {caps}")
        shape = tuple(c + 1 for c in caps)
        if num.shape != shape:
            raise ValueError(f"coefficient array shape {num.shape} does not match caps {caps}")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        num, den = _reduce(num.astype(object), int(den))
        num.setflags(write=False)
        self.caps = caps
        self._num = num
        self._den = den

    @classmethod
    def zero(cls, caps: Sequence[int]) -> TruncPoly:
        return cls(caps, np.zeros(tuple(c + 1 for c in caps), dtype=object))

    @classmethod
    def one(cls, caps: Sequence[int]) -> TruncPoly:
        num = np.zeros(tuple(c + 1 for c in caps), dtype=object)
        num[(0,) * len(caps)] = 1
        return cls(caps, num)

    @classmethod
    def from_terms(cls, caps: Sequence[int], terms: Mapping[tuple[int, ...], Fraction | int]) -> TruncPoly:
        """Build from ``{exponent vector: coefficient}``; exponents must respect the caps."""
        caps = tuple(caps)
        den = 1
        for c in terms.values():
            den = math.lcm(den, Fraction(c).denominator)
        num = np.zeros(tuple(c + 1 for c in caps), dtype=object)
        for exps, c in terms.items():
            _check_exps(caps, exps)
            c = Fraction(c)
            num[tuple(exps)] += c.numerator * (den // c.denominator)
        return cls(caps, num, den)

    @property
    def variable_count(self) -> int:
        return len(self.caps)

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        """Sparse view: nonzero coefficients keyed by exponent vector."""
        out = {}
        for idx in zip(*np.nonzero(self._num != 0)):
            e = tuple(int(i) for i in idx)
            out[e] = Fraction(int(self._num[e]), self._den)
        return out

    def is_zero(self) -> bool:
        return not any(self._num.flat)

    def __len__(self) -> int:
        return int(np.count_nonzero(self._num != 0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return (
            self.caps == other.caps
            and self._den == other._den
            and bool(np.all(self._num == other._num))
        )

    def __hash__(self) -> int:
        return hash((self.caps, self._den, tuple(self._num.flat)))

    def __repr__(self) -> str:
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"u{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"TruncPoly(caps={self.caps}, {' + '.join(parts) or '0'})"

    def _same_shape(self, other: TruncPoly) -> None:
        if self.caps != other.caps:
            raise ValueError(f"mismatched polynomial shapes: caps {self.caps} vs {other.caps}")

    def __add__(self, other: TruncPoly) -> TruncPoly:
        self._same_shape(other)
        den = math.lcm(self._den, other._den)
        num = self._num * (den // self._den) + other._num * (den // other._den)
        return TruncPoly(self.caps, num, den)

    def __sub__(self, other: TruncPoly) -> TruncPoly:
        return self + other.scale(-1)

    def scale(self, factor: Fraction | int) -> TruncPoly:
        factor = Fraction(factor)
        return TruncPoly(self.caps, self._num * factor.numerator, self._den * factor.denominator)

    def __mul__(self, other: TruncPoly) -> TruncPoly:
        return tp_mul(self, other)

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return tp_coeff(self, exps)

    def constant_term(self) -> Fraction:
        return Fraction(int(self._num[(0,) * len(self.caps)]), self._den)


def _check_exps(caps: tuple[int, ...], exps: Sequence[int]) -> None:
    if len(exps) != len(caps):
        raise ValueError(f"exponent vector {tuple(exps)} has length {len(exps)}, expected {len(caps)}")
    for e, c in zip(exps, caps):
        if not 0 <= e <= c:
            raise ValueError(f"exponent vector {tuple(exps)} outside caps {caps}")


def tp_mul(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    """Truncated product: terms with any exponent above its cap are dropped."""
    a._same_shape(b)
    if len(a) > len(b):
        a, b = b, a
    bound = np.array(a.caps) + 1
    out = np.zeros(a._num.shape, dtype=object)
    bn = b._num
    for idx in zip(*np.nonzero(a._num != 0)):
        coef = a._num[idx]
        dst = tuple(slice(i, None) for i in idx)
        src = tuple(slice(0, int(n - i)) for i, n in zip(idx, bound))
        out[dst] += coef * bn[src]
    return TruncPoly(a.caps, out, a._den * b._den)


def tp_pow(f: TruncPoly, n: int) -> TruncPoly:
    """``f**n`` under truncation, by binary exponentiation."""
    if n < 0:
        raise ValueError("negative power")
    result = TruncPoly.one(f.caps)
    base = f
    while n:
        if n & 1:
            result = tp_mul(result, base)
        n >>= 1
        if n:
            base = tp_mul(base, base)
    return result


def tp_coeff(f: TruncPoly, exps: Sequence[int]) -> Fraction:
    _check_exps(f.caps, exps)
    return Fraction(int(f._num[tuple(exps)]), f._den)


class BinomialPowers:
    """Powers ``f**N`` of a polynomial with constant term 1, for many ``N``.

    With ``f = 1 + g`` the truncation makes ``g`` nilpotent, so
    ``f**N = sum_j binom(N, j) g**j`` is a finite sum whose length does not
    depend on ``N``.  The powers of ``g`` are computed once.
    """

    def __init__(self, f: TruncPoly):
        if f.constant_term() != 1:
            raise ValueError("binomial expansion needs constant term 1")
        g = f - TruncPoly.one(f.caps)
        self.caps = f.caps
        self.powers = [TruncPoly.one(f.caps)]
        p = g
        while not p.is_zero():
            self.powers.append(p)
            p = tp_mul(p, g)

    def coeff(self, N: int, exps: Sequence[int]) -> Fraction:
        """Coefficient of ``u^exps`` in ``f**N``."""
        total = Fraction(0)
        for j, p in enumerate(self.powers):
            if j > N:
                break
            c = p.coeff(exps)
            if c:
                total += math.comb(N, j) * c
        return total

    def power(self, N: int) -> TruncPoly:
        acc = TruncPoly.zero(self.caps)
        for j, p in enumerate(self.powers[: N + 1]):
            acc = acc + p.scale(math.comb(N, j))
        return acc


@dataclass(frozen=True)
class ScaledValue:
    """Exact number ``q * c**(e/2)`` with ``e`` in ``{0, 1}``.

    ``c`` is the positive rational base (the mean degree in this package).
    """

    q: Fraction
    e: int
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.e not in (0, 1):
            raise ValueError("half-power residue must be 0 or 1")
        if self.c <= 0:
            raise ValueError("base must be positive")
        if self.q == 0 and self.e:
            object.__setattr__(self, "e", 0)

    @classmethod
    def from_half_power(cls, q: Fraction | int, half: int, c: Fraction | int) -> ScaledValue:
        """``q * c**(half/2)`` with the integer part of the exponent folded into ``q``."""
        c = Fraction(c)
        whole, e = divmod(half, 2)
        return cls(Fraction(q) * c**whole, e, c)

    def __mul__(self, other: ScaledValue | Fraction | int) -> ScaledValue:
        if isinstance(other, ScaledValue):
            if other.c != self.c:
                raise ValueError("cannot multiply values with different bases")
            return ScaledValue.from_half_power(self.q * other.q, self.e + other.e, self.c)
        return ScaledValue(self.q * Fraction(other), self.e, self.c)

    __rmul__ = __mul__

    def __float__(self) -> float:
        v = float(self.q)
        return v * math.sqrt(self.c) if self.e else v

    def is_rational(self) -> bool:
        return self.e == 0 or self.q == 0 or _rational_sqrt(self.c) is not None

    def to_fraction(self) -> Fraction:
        if self.e == 0 or self.q == 0:
            return self.q
        r = _rational_sqrt(self.c)
        if r is None:
            raise ValueError(f"{self} is irrational")
        return self.q * r

    def __str__(self) -> str:
        if self.e == 0 or self.q == 0:
            return str(self.q)
        return f"{self.q}*sqrt({self.c})"


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if p * p == x.numerator and q * q == x.denominator:
        return Fraction(p, q)
    return None


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    return _rational_sqrt(Fraction(x))
