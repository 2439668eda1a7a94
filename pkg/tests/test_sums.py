import math
import os
import sys
from fractions import Fraction

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from tools.beatty import BeattyParams
from tools.errors import DomainError, ParameterError, PrecisionExhaustedError, RangeError
from tools.mangoldt import build_mangoldt_table, chebyshev_sum
from tools.realspec import GOLDEN_RATIO, SQRT2, DecimalLiteral, Rational
from tools.sums import (
    PhaseReducer,
    beatty_discrepancy,
    fractional_parts,
    lemma23_bound,
    progression_twisted_sum,
    reduced_phase,
    reindexed_progression_sum,
    sequence_discrepancy,
    twisted_sum,
)


@pytest.fixture(scope="module")
def table():
    return build_mangoldt_table(50_000)


def direct_sum(table, x, theta, c, d):
    n = np.arange(1, x + 1)
    keep = (n % d) == c
    return np.sum(table.values(1, x + 1)[keep] * np.exp(2j * np.pi * theta * n[keep]))


def test_zero_phase_is_chebyshev(table):
    S = twisted_sum(table, 10_000, 0, 1, 4)
    assert S.real == pytest.approx(chebyshev_sum(table, 10_000, 1, 4), rel=1e-14)
    assert S.imag == 0.0
    assert S.mass == pytest.approx(S.real, rel=1e-14)


def test_half_phase_alternates(table):
    S = twisted_sum(table, 1000, Fraction(1, 2), 0, 1)
    # e(n/2) = (−1)^n: only powers of 2 carry sign +1
    lam = table.values(1, 1001)
    signs = np.where(np.arange(1, 1001) % 2 == 0, 1.0, -1.0)
    assert S.real == pytest.approx(float(np.sum(lam * signs)), abs=1e-9)


@pytest.mark.parametrize("c, d", [(0, 1), (1, 3), (2, 5)])
def test_matches_direct_evaluation(table, c, d):
    S = twisted_sum(table, 5000, SQRT2.reciprocal(), c, d)
    expected = direct_sum(table, 5000, 1 / math.sqrt(2), c, d)
    assert abs(S.value - expected) < 1e-8
    assert S.modulus <= S.mass
    assert S.phase_error == 0.0


def test_float_and_exact_phase_agree(table):
    exact = twisted_sum(table, 20_000, GOLDEN_RATIO, 0, 1)
    approx = twisted_sum(table, 20_000, (1 + math.sqrt(5)) / 2, 0, 1)
    assert abs(exact.value - approx.value) < 1e-6


@pytest.mark.parametrize("c, d", [(0, 1), (1, 4)])
def test_negated_phase_conjugates(table, c, d):
    for theta, negated in [
        (SQRT2.reciprocal(), SQRT2.reciprocal().affine(-1, 0)),
        (GOLDEN_RATIO, -GOLDEN_RATIO),
        (Fraction(3, 7), Fraction(-3, 7)),
        (0.3183098861837907, -0.3183098861837907),
    ]:
        S = twisted_sum(table, 20_000, theta, c, d)
        T = twisted_sum(table, 20_000, negated, c, d)
        assert abs(T.value - S.value.conjugate()) < 1e-8
        assert T.mass == S.mass


def test_integer_shift_of_phase_changes_nothing(table):
    assert twisted_sum(table, 10_000, 1, 0, 1).value == twisted_sum(table, 10_000, 0, 0, 1).value
    assert twisted_sum(table, 10_000, 1.25, 1, 3).value == twisted_sum(table, 10_000, 0.25, 1, 3).value
    shifted = twisted_sum(table, 10_000, SQRT2.affine(1, 1), 0, 1)
    assert shifted.value == twisted_sum(table, 10_000, SQRT2, 0, 1).value


def test_progression_sum_with_unit_modulus_is_twisted_sum(table):
    gamma = SQRT2.reciprocal()
    a = progression_twisted_sum(table, 10_000, 1, 0, gamma, 3)
    b = twisted_sum(table, 10_000, gamma.affine(3, 0), 0, 1)
    assert a.value == b.value


@pytest.mark.parametrize("d, c", [(1, 0), (2, 1), (3, 2), (7, 0), (10, 3), (20, 19)])
@pytest.mark.parametrize("gamma", [SQRT2.reciprocal(), GOLDEN_RATIO.reciprocal()])
def test_reindexing_identity(table, d, c, gamma):
    for k in (1, 4, 10):
        direct = progression_twisted_sum(table, 2000, d, c, gamma, k).value
        assert abs(direct - reindexed_progression_sum(table, 2000, d, c, gamma, k)) < 1e-9


def test_sum_argument_checks(table):
    with pytest.raises(ParameterError):
        twisted_sum(table, 100, 0.5, 2, 2)
    with pytest.raises(RangeError):
        twisted_sum(table, 60_000, 0.5, 0, 1)
    with pytest.raises(ParameterError):
        twisted_sum(table, 100, float("nan"), 0, 1)


def test_reduced_phase_exact_for_quadratic():
    n = np.array([1, 10**6 + 3, 10**9 + 7], dtype=np.int64)
    got = reduced_phase(SQRT2, n)
    expected = [float(SQRT2.affine(int(k), 0).frac()) for k in n]
    assert np.allclose(got, expected, atol=1e-12)
    assert PhaseReducer(SQRT2).exact


def test_reduced_phase_limbs_for_floats():
    n = np.array([3, 7, 2**35], dtype=np.int64)
    got = reduced_phase(0.1, n)
    expected = [float((Fraction(0.1) * int(k)) % 1) for k in n]
    assert np.allclose(got, expected, atol=1e-12)
    with pytest.raises(RangeError):
        reduced_phase(0.1, np.array([2**36]))


def test_coarse_theta_is_refused():
    coarse = DecimalLiteral(digits="0.1234567890")
    with pytest.raises(PrecisionExhaustedError):
        reduced_phase(coarse, np.arange(1, 1000))


def test_lemma23_bound():
    x, q = 10**6, 100
    expected = (x / 10 + math.sqrt(q * x) + x ** 0.8) * math.log(x) ** 3
    assert lemma23_bound(x, q) == pytest.approx(expected)
    with pytest.raises(DomainError):
        lemma23_bound(1, 3)
    with pytest.raises(ParameterError):
        lemma23_bound(100, 0)


def test_fractional_parts():
    parts = fractional_parts(SQRT2, Rational(p=1, q=3), 5)
    expected = [(k * math.sqrt(2) + 1 / 3) % 1 for k in range(1, 6)]
    assert np.allclose(parts, expected, atol=1e-12)
    with pytest.raises(ParameterError):
        fractional_parts(SQRT2, Rational(p=0), 0)


def test_rational_alpha_discrepancy():
    result = sequence_discrepancy(Rational(p=1, q=2), Rational(p=0), 4)
    assert result.value == pytest.approx(0.5)


def test_golden_ratio_discrepancy_is_logarithmic():
    params = BeattyParams(alpha=GOLDEN_RATIO, beta=Rational(p=0))
    for M in (100, 1000, 10_000):
        assert beatty_discrepancy(params, M).value <= 3 * math.log(M) / M
