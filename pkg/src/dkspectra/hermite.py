"""Limit law ``c**(k/2) H_k(g) / k!``: monic Hermite polynomials and Gaussian moments.

Everything here is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial, ``coeffs[i]`` multiplying ``x**i``."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs: int | Fraction) -> UniPoly:
        return cls(tuple(Fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: UniPoly) -> UniPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> UniPoly:
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + (-other)

    def __mul__(self, other: UniPoly | Fraction | int) -> UniPoly:
        if not isinstance(other, UniPoly):
            return UniPoly(tuple(c * other for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return UniPoly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> UniPoly:
        result = UniPoly.of(1)
        for _ in range(n):
            result = result * self
        return result

    def shift(self) -> UniPoly:
        """Multiply by ``x``."""
        return UniPoly((Fraction(0),) + self.coeffs) if self.coeffs else self

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                coef = "" if mono and abs(c) == 1 else str(abs(c))
                terms.append(("-" if c < 0 else "+") + coef + mono)
        s = "".join(terms).lstrip("+")
        return s or "0"


X = UniPoly.of(0, 1)


@lru_cache(maxsize=None)
def monic_hermite(n: int) -> UniPoly:
    """Monic (probabilists') Hermite polynomial via ``x H_n = H_{n+1} + n H_{n-1}``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    prev, cur = UniPoly.of(1), X
    if n == 0:
        return prev
    for j in range(1, n):
        prev, cur = cur, cur.shift() - prev * j
    return cur


@lru_cache(maxsize=None)
def gaussian_moment(n: int) -> Fraction:
    """``E[g**n]`` for standard normal ``g``: 0 for odd n, ``(2k)!/(2^k k!)`` for ``n = 2k``."""
    if n < 0:
        raise ValueError("order must be non-negative")
    if n % 2:
        return Fraction(0)
    k = n // 2
    return Fraction(math.factorial(2 * k), 2**k * math.factorial(k))


def expect_gaussian(p: UniPoly) -> Fraction:
    return sum((c * gaussian_moment(i) for i, c in enumerate(p.coeffs)), Fraction(0))


@lru_cache(maxsize=None)
def hermite_power_expectation(k: int, m: int) -> Fraction:
    """``E[H_k(g)**m]``, expanding the power in monomials."""
    if k < 0 or m < 0:
        raise ValueError("k and m must be non-negative")
    if (k * m) % 2:
        return Fraction(0)
    return expect_gaussian(monic_hermite(k) ** m)


def limit_moment(c: Fraction | int, k: int, m: int) -> Fraction:
    """``m``-th moment of ``c**(k/2) H_k(g) / k!``.

    The half-power of ``c`` only appears when ``k m`` is odd, where the
    expectation vanishes, so the result is always rational.
    """
    c = Fraction(c)
    if c <= 0:
        raise ValueError("mean degree must be positive")
    e = hermite_power_expectation(k, m)
    if e == 0:
        return Fraction(0)
    return c ** (k * m // 2) * e / Fraction(math.factorial(k)) ** m


@lru_cache(maxsize=None)
def pn_polynomial(n: int) -> UniPoly:
    """``p_n(x, 0, ..., 0)`` from ``p_{n+1} = x p_n - n p_{n-1} - n! y_n`` at ``y = 0``.

    Seeds are ``p_1 = x`` and ``p_2 = x^2 - 1 - y_1``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return X
    prev, cur = X, X * X - UniPoly.of(1)
    for j in range(2, n):
        prev, cur = cur, cur.shift() - prev * j
    return cur


def physicists_hermite(n: int) -> UniPoly:
    """``H_n`` from ``2x H_n = H_{n+1} + 2n H_{n-1}``, ``H_0 = 1``, ``H_1 = 2x``."""
    prev, cur = UniPoly.of(1), UniPoly.of(0, 2)
    if n == 0:
        return prev
    for j in range(1, n):
        prev, cur = cur, cur.shift() * 2 - prev * (2 * j)
    return cur


def rescale_monic(p: UniPoly, n: int) -> UniPoly:
    """``2**(n/2) p(sqrt(2) x)`` for a degree-``n`` parity-``n`` polynomial.

    Maps the monic Hermite polynomial onto the physicists' one.  Only the
    coefficients of ``x**i`` with ``i = n mod 2`` survive, so the result is
    rational.
    """
    out = []
    for i, c in enumerate(p.coeffs):
        if c == 0:
            out.append(Fraction(0))
            continue
        if (i - n) % 2:
            raise ValueError("polynomial does not have the parity of its degree")
        out.append(c * Fraction(2) ** ((n + i) // 2))
    return UniPoly(tuple(out))
