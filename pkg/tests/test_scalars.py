import math
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from monodromy_lab.scalars import QQ, QuadraticField

small_fractions = st.fractions(
    min_value=Fraction(-10**6), max_value=Fraction(10**6), max_denominator=10**6
)


def test_rational_field_basics():
    assert QQ.coerce(3) == Fraction(3)
    assert QQ.coerce("2/7") == Fraction(2, 7)
    assert QQ.zero == 0 and QQ.one == 1
    assert QQ.real_value(Fraction(1, 4)) == 0.25


def test_quadratic_arithmetic_exact():
    k = QuadraticField(2, "+")
    s = k.sqrt_gen
    assert s * s == 2
    x = k.element(Fraction(1, 3), Fraction(2, 5))
    assert x * x.inverse() == k.one
    assert (x + s) - s == x
    assert (1 - s) * (1 + s) == -1


def test_quadratic_requires_squarefree():
    import pytest

    with pytest.raises(ValueError):
        QuadraticField(4)
    with pytest.raises(ValueError):
        QuadraticField(12)


def test_embedding_signs():
    plus, minus = QuadraticField(2, "+"), QuadraticField(2, "-")
    assert plus.sqrt_gen.sign() == 1
    assert minus.sqrt_gen.sign() == -1
    # 1 - sqrt(2) is negative under +, positive under -
    assert (plus.one - plus.sqrt_gen).sign() == -1
    assert (minus.one - minus.sqrt_gen).sign() == 1
    assert plus.is_positive(plus.element(1, -1)) is False  # 1 - 1.414... < 0
    assert minus.is_positive(minus.element(1, -1)) is True
    assert plus.is_positive(plus.element(3, -2)) is True  # 3 - 2.828... > 0


@given(small_fractions, small_fractions, small_fractions, small_fractions)
@settings(max_examples=150, deadline=None)
def test_real_value_is_a_ring_homomorphism(a, b, c, d):
    k = QuadraticField(2, "+")
    x, y = k.element(a, b), k.element(c, d)
    # relative to the size of the intermediates (cancellation is allowed)
    mag_x = abs(float(a)) + 1.5 * abs(float(b))
    mag_y = abs(float(c)) + 1.5 * abs(float(d))
    for op, scale in (
        (lambda u, v: u + v, mag_x + mag_y),
        (lambda u, v: u - v, mag_x + mag_y),
        (lambda u, v: u * v, mag_x * mag_y),
    ):
        lhs = k.real_value(op(x, y))
        rhs = op(k.real_value(x), k.real_value(y))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, scale)


@given(small_fractions, small_fractions)
@settings(max_examples=150, deadline=None)
def test_exact_sign_matches_float_sign(a, b):
    for emb in ("+", "-"):
        k = QuadraticField(3, emb)
        x = k.element(a, b)
        val = k.real_value(x)
        if abs(val) > 1e-6:  # floats can't be trusted on near-ties; sign() can
            assert x.sign() == (1 if val > 0 else -1)


def test_sign_on_float_ties():
    # 10000000001/14142135624 is within 4e-11 of sqrt(2): sign stays exact
    k = QuadraticField(2, "+")
    near = Fraction(10000000001, 14142135624)
    x = k.element(near, -1)
    assert x.sign() == (1 if near * near > 2 else -1)
