import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkspectra.poly import BinomialPowers, ScaledValue, TruncPoly, tp_coeff, tp_mul, tp_pow


def P(caps, terms):
    return TruncPoly.from_terms(caps, terms)


def test_mul_expansion():
    a = P((1, 1), {(0, 0): 1, (1, 0): 1})
    b = P((1, 1), {(0, 0): 1, (0, 1): 1})
    assert tp_mul(a, b) == P((1, 1), {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})


def test_mul_truncates():
    a = P((1,), {(0,): 1, (1,): 1})
    assert tp_mul(a, a) == P((1,), {(0,): 1, (1,): 2})


def test_mul_by_zero():
    a = P((2, 1), {(0, 0): 3, (2, 1): Fraction(-1, 7)})
    assert tp_mul(a, TruncPoly.zero((2, 1))).is_zero()


def test_mul_shape_mismatch():
    with pytest.raises(ValueError, match="mismatched"):
        tp_mul(TruncPoly.one((1,)), TruncPoly.one((2,)))


def test_pow_binomial():
    f = P((1, 1), {(0, 0): 1, (1, 1): 1})
    assert tp_coeff(tp_pow(f, 3), (1, 1)) == 3
    assert tp_pow(f, 0) == TruncPoly.one((1, 1))


def test_coeff():
    f = P((1,), {(0,): 1, (1,): 3})
    assert tp_coeff(f, (1,)) == 3
    assert tp_coeff(f, (0,)) == 1
    assert tp_coeff(P((2,), {(0,): 1}), (2,)) == 0
    with pytest.raises(ValueError):
        tp_coeff(f, (2,))


def test_canonical_form():
    f = P((1,), {(0,): Fraction(2, 4), (1,): Fraction(1, 2)})
    assert f.denominator == 2
    g = P((1,), {(0,): Fraction(1, 3), (1,): Fraction(1, 6)}) + P((1,), {(0,): Fraction(1, 6), (1,): Fraction(1, 3)})
    assert g == f
    assert g.terms == {(0,): Fraction(1, 2), (1,): Fraction(1, 2)}


caps_st = st.lists(st.integers(0, 2), min_size=1, max_size=3).map(tuple)


@st.composite
def polys(draw, caps=None, constant_one=False):
    caps = caps if caps is not None else draw(caps_st)
    ranges = [range(c + 1) for c in caps]
    terms = {}
    for _ in range(draw(st.integers(0, 5))):
        e = tuple(draw(st.sampled_from(r)) for r in ranges)
        terms[e] = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
    if constant_one:
        terms[(0,) * len(caps)] = Fraction(1)
    return P(caps, terms)


@st.composite
def poly_triples(draw):
    caps = draw(caps_st)
    return tuple(draw(polys(caps)) for _ in range(3))


@given(poly_triples())
@settings(max_examples=60, deadline=None)
def test_ring_laws(t):
    a, b, c = t
    assert tp_mul(a, b) == tp_mul(b, a)
    assert tp_mul(tp_mul(a, b), c) == tp_mul(a, tp_mul(b, c))
    assert tp_mul(a, b + c) == tp_mul(a, b) + tp_mul(a, c)


def _naive_mul(a, b):
    out = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if all(x <= c for x, c in zip(e, a.caps)):
                out[e] = out.get(e, 0) + ca * cb
    return P(a.caps, out)


@given(poly_triples())
@settings(max_examples=60, deadline=None)
def test_mul_matches_naive_double_loop(t):
    a, b, _ = t
    assert tp_mul(a, b) == _naive_mul(a, b)


@given(polys())
@settings(max_examples=40, deadline=None)
def test_pow_is_repeated_multiplication(f):
    acc = TruncPoly.one(f.caps)
    for _ in range(5):
        acc = tp_mul(acc, f)
    assert tp_pow(f, 5) == acc


@given(polys(constant_one=True), st.integers(0, 40))
@settings(max_examples=40, deadline=None)
def test_binomial_powers_match_binary_exponentiation(f, n):
    bp = BinomialPowers(f)
    assert bp.power(n) == tp_pow(f, n)


def test_binomial_powers_large_n():
    f = P((2, 2), {(0, 0): 1, (1, 1): Fraction(1, 3), (2, 0): 2, (0, 1): -1})
    n = 2**20
    assert BinomialPowers(f).power(n) == tp_pow(f, n)


def test_binomial_requires_unit_constant():
    with pytest.raises(ValueError):
        BinomialPowers(P((1,), {(0,): 2}))


@given(
    st.fractions(min_value=-20, max_value=20, max_denominator=50),
    st.fractions(min_value=-20, max_value=20, max_denominator=50),
    st.integers(-3, 3),
    st.integers(-3, 3),
    st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=20),
)
def test_scaled_value_product_matches_floats(q1, q2, h1, h2, c):
    a = ScaledValue.from_half_power(q1, h1, c)
    b = ScaledValue.from_half_power(q2, h2, c)
    expected = float(q1) * float(q2) * math.sqrt(float(c)) ** (h1 + h2)
    got = float(a * b)
    assert got == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_scaled_value_canonical_zero():
    z = ScaledValue(0, 1, 3)
    assert (z.q, z.e) == (0, 0)
    assert ScaledValue.from_half_power(2, 3, 4) == ScaledValue(8, 1, 4)
    assert ScaledValue(Fraction(1, 2), 1, 4).to_fraction() == 1
    with pytest.raises(ValueError):
        ScaledValue(1, 1, 2).to_fraction()
