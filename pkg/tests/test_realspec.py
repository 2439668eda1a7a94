import math
import os
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings as hsettings, strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from tools.errors import DomainError, ParameterError, PrecisionExhaustedError
from tools.realspec import (
    GOLDEN_RATIO,
    SQRT2,
    DecimalLiteral,
    QuadraticIrrational,
    Rational,
    parse_real_spec,
    require_irrational,
)


def test_quadratic_floor_and_compare():
    assert SQRT2.floor() == 1
    assert GOLDEN_RATIO.floor() == 1
    assert SQRT2.compare(Fraction(141421, 100000)) == 1
    assert SQRT2.compare(Fraction(141422, 100000)) == -1
    assert GOLDEN_RATIO.affine(1000, 0).floor() == 1618


def test_reciprocal_stays_in_field():
    assert SQRT2.reciprocal() == QuadraticIrrational(p=0, r=1, D=2, q=2)
    # 1/φ = φ − 1
    assert GOLDEN_RATIO.reciprocal() == GOLDEN_RATIO.affine(1, -1)


def test_make_collapses_squares():
    assert QuadraticIrrational.make(1, 2, 9) == Rational(p=7)
    assert QuadraticIrrational.make(0, 1, 8) == QuadraticIrrational(p=0, r=2, D=2, q=1)


def test_large_square_factors_are_stripped():
    assert QuadraticIrrational(p=0, r=1, D=2 * 10007 ** 2, q=1) == QuadraticIrrational(p=0, r=10007, D=2, q=1)
    assert QuadraticIrrational(p=1, r=1, D=5 * 1_000_003 ** 2, q=2).D == 5
    assert QuadraticIrrational(p=0, r=1, D=3 * 10007 ** 2 * 10009 ** 2, q=1).r == 10007 * 10009
    assert QuadraticIrrational(p=0, r=1, D=10007 * 10009, q=1).D == 10007 * 10009
    assert QuadraticIrrational.make(2, 1, 1_000_003 ** 2) == Rational(p=1_000_005)


def test_rational_normalises():
    assert Rational(p=6, q=-4) == Rational(p=-3, q=2)
    assert Rational(p=-3, q=2).floor() == -2
    assert Rational(p=4, q=2).is_integer()


def test_nearest_integer_and_frac():
    assert SQRT2.nearest_integer() == 1
    assert SQRT2.affine(3, 0).nearest_integer() == 4
    assert float(SQRT2.frac()) == pytest.approx(math.sqrt(2) - 1)


def test_parse_real_spec_forms():
    assert parse_real_spec("rat:3/10") == Rational(p=3, q=10)
    assert parse_real_spec("0.3") == Rational(p=3, q=10)
    assert parse_real_spec("sqrt:2") == SQRT2
    assert parse_real_spec("quad:1,1,5,2") == GOLDEN_RATIO
    assert isinstance(parse_real_spec("dec:1.41421356237"), DecimalLiteral)


@pytest.mark.parametrize("text", ["", "rat:1/0", "quad:1,2", "pi", "sqrt:-3"])
def test_parse_real_spec_rejects(text):
    with pytest.raises(ParameterError):
        parse_real_spec(text)


def test_decimal_floor_needs_precision():
    x = DecimalLiteral(digits="2.0000", bits=64)
    with pytest.raises(PrecisionExhaustedError):
        x.floor()
    assert DecimalLiteral(digits="2.5", bits=64).floor() == 2


def test_require_irrational():
    require_irrational(SQRT2)
    with pytest.raises(DomainError):
        require_irrational(Rational(p=3, q=2))


def test_mixed_fields_fall_back_to_enclosures():
    total = SQRT2 + parse_real_spec("sqrt:3")
    assert float(total) == pytest.approx(math.sqrt(2) + math.sqrt(3))
    assert total.floor() == 3


@hsettings(derandomize=True, max_examples=200)
@given(a=st.integers(-50, 50).filter(bool), b=st.integers(-1000, 1000), q=st.integers(1, 50))
def test_affine_floor_matches_float(a, b, q):
    x = SQRT2.affine(Fraction(a, q), Fraction(b, q))
    value = (a * math.sqrt(2) + b) / q
    # exact answer agrees with float away from integers
    if abs(value - round(value)) > 1e-9:
        assert x.floor() == math.floor(value)


@hsettings(derandomize=True, max_examples=200)
@given(num=st.integers(-10**6, 10**6), den=st.integers(1, 10**6))
def test_compare_is_consistent_with_enclosure(num, den):
    f = Fraction(num, den)
    lo, hi = GOLDEN_RATIO.enclosure(80)
    sign = GOLDEN_RATIO.compare(f)
    if f <= lo:
        assert sign == 1
    elif f >= hi:
        assert sign == -1
