import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from momentkit.errors import ParseError, VariableCountError
from momentkit.poly import (Polynomial, add, binomial_product, evaluate, format_polynomial, monomials_upto,
                            mul, parse_polynomial, power, two_product)


def P(text, s=1):
    return parse_polynomial(text, s)


def test_add_cancels_to_constant():
    assert add(P("1 + x"), P("1 - x")) == P("2")


def test_add_zero_identity():
    p = P("3 - x1 + 0.25 * x1^3")
    assert add(p, Polynomial.zero(1)) == p


def test_add_two_variables():
    assert add(P("x1", 2), P("x2", 2)) == P("x1 + x2", 2)


def test_mul_examples():
    assert mul(P("1 - x"), P("1 + x")) == P("1 - x^2")
    assert mul(P("1 + x"), P("1 + x")) == P("1 + 2 x + x^2")
    assert mul(P("x1 + x2", 2), P("x1 + x2", 2)) == P("x1^2 + 2 x1 x2 + x2^2", 2)


def test_variable_count_mismatch():
    with pytest.raises(VariableCountError):
        add(P("x"), P("x1", 2))
    with pytest.raises(VariableCountError):
        mul(P("x"), P("x1", 2))
    with pytest.raises(VariableCountError):
        evaluate(P("x1 + x2", 2), [1.0])


def test_pow_examples():
    assert power(P("1 + x"), 2) == P("1 + 2x + x^2")
    assert power(P("5 - x + x^3"), 0) == Polynomial.one(1)
    assert power(P("1 - x^2"), 2) == P("1 - 2x^2 + x^4")


def test_evaluate_examples():
    assert evaluate(P("1 - x^2"), [0.5]) == 0.75
    p = P("-2.5 + x1 x2 + x2^3", 2)
    assert evaluate(p, [0.0, 0.0]) == -2.5
    assert evaluate(P("x1^2 + x2^2", 2), [0.6, 0.8]) == pytest.approx(1.0, abs=1e-15)


def test_binomial_product_examples():
    x = P("x")
    assert binomial_product(1.0, x, 1, 1) == P("1 - x^2")
    assert binomial_product(2.0, x, 0, 0) == Polynomial.one(1)
    assert binomial_product(1.0, x, 2, 0) == P("1 - 2x + x^2")
    with pytest.raises(ValueError):
        binomial_product(0.0, x, 1, 1)


def test_canonical_form_drops_zeros():
    p = Polynomial(2, {(1, 0): 1.0, (0, 1): 0.0})
    assert p.terms == {(1, 0): 1.0}
    assert Polynomial.zero(3).terms == {}
    assert (P("x") - P("x")).is_zero()


def test_grlex_basis_order():
    assert monomials_upto(2, 2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert len(monomials_upto(3, 4)) == math.comb(7, 3)


def test_format_matches_text_format():
    assert format_polynomial(P("1 - x1^2 - x2^2", 2)) == "1 - x1^2 - x2^2"
    assert format_polynomial(P("0.5*x1*x2^3 - 2", 2)) == "-2 + 0.5 * x1 * x2^3"
    assert format_polynomial(Polynomial.zero(2)) == "0"


@pytest.mark.parametrize("text", ["1 +", "x3", "x1 ^ -1", "(1 + x", "2 $ x", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_polynomial(text, 2)


def test_parse_parentheses_and_powers():
    assert P("(1 - x)^2 (1 + x)") == P("1 - x - x^2 + x^3")
    assert P("-(x1 - x2)**2", 2) == P("-x1^2 + 2 x1 x2 - x2^2", 2)
    assert P("1e-05 x") == Polynomial(1, {(1,): 1e-05})


# property tests: integer coefficients keep every operation exact

small_ints = st.integers(-5, 5)


@st.composite
def int_polys(draw, s=None):
    s = draw(st.integers(1, 3)) if s is None else s
    exps = st.tuples(*([st.integers(0, 4)] * s)).filter(lambda e: sum(e) <= 4)
    terms = draw(st.dictionaries(exps, small_ints, max_size=5))
    return Polynomial(s, terms)


@st.composite
def poly_triples(draw):
    s = draw(st.integers(1, 3))
    return draw(int_polys(s)), draw(int_polys(s)), draw(int_polys(s))


@settings(max_examples=150, deadline=None)
@given(poly_triples())
def test_ring_axioms(triple):
    p, q, r = triple
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@settings(max_examples=60, deadline=None)
@given(int_polys(), st.integers(0, 8))
def test_pow_equals_repeated_mul(p, k):
    expected = Polynomial.one(p.num_vars)
    for _ in range(k):
        expected = expected * p
    assert p ** k == expected


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_evaluate_is_ring_homomorphism(data):
    s = data.draw(st.integers(1, 3))
    coef = st.floats(-1e3, 1e3, allow_nan=False)
    exps = st.tuples(*([st.integers(0, 3)] * s))
    p = Polynomial(s, data.draw(st.dictionaries(exps, coef, max_size=4)))
    q = Polynomial(s, data.draw(st.dictionaries(exps, coef, max_size=4)))
    pt = data.draw(st.lists(st.floats(-1.5, 1.5), min_size=s, max_size=s))
    ep, eq = evaluate(p, pt), evaluate(q, pt)
    scale = max(1.0, abs(ep), abs(eq))
    assert evaluate(p + q, pt) == pytest.approx(ep + eq, rel=1e-12, abs=1e-12 * scale * 1e3)
    # products lose relative accuracy only through cancellation inside each factor
    mag = evaluate(Polynomial(s, {e: abs(c) for e, c in p.items()}), [abs(v) for v in pt])
    mag *= evaluate(Polynomial(s, {e: abs(c) for e, c in q.items()}), [abs(v) for v in pt])
    assert abs(evaluate(p * q, pt) - ep * eq) <= 1e-12 * max(1.0, mag)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_print_parse_round_trip(data):
    s = data.draw(st.integers(1, 3))
    exps = st.tuples(*([st.integers(0, 4)] * s))
    coef = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False) | st.floats(-1e-8, 1e-8)
    p = Polynomial(s, data.draw(st.dictionaries(exps, coef, max_size=6)))
    back = parse_polynomial(format_polynomial(p), s)
    assert back.terms == p.terms


@settings(max_examples=300, deadline=None)
@given(st.floats(-1e150, 1e150, allow_nan=False), st.floats(-1e150, 1e150, allow_nan=False))
def test_two_product_is_error_free(a, b):
    # exactness needs the rounding error itself to be representable (no underflow)
    assume(a == 0 or b == 0 or abs(a * b) > 1e-280)
    p, e = two_product(a, b)
    assert p == a * b
    assert Fraction(p) + Fraction(e) == Fraction(a) * Fraction(b)


def test_mul_coefficients_correctly_rounded():
    p = P("0.1 + 0.7 x")
    q = P("0.3 - 0.9 x")
    exact = {(0,): Fraction(0.1) * Fraction(0.3),
             (1,): Fraction(0.1) * Fraction(-0.9) + Fraction(0.7) * Fraction(0.3),
             (2,): Fraction(0.7) * Fraction(-0.9)}
    assert (p * q).terms == {e: float(v) for e, v in exact.items()}
