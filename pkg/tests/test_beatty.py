import os
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from pydantic import ValidationError

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from tools.beatty import (
    BeattyParams,
    beatty_lambda_sum,
    beatty_term,
    beatty_terms,
    complementary_params,
    criterion_mask,
    floor_difference,
    hit_count,
    hit_counts,
    is_member,
    member_mask,
    recover_index,
)
from tools.errors import DomainError, ParameterError, RangeError
from tools.mangoldt import build_mangoldt_table
from tools.realspec import GOLDEN_RATIO, SQRT2, DecimalLiteral, Rational

SQRT2_DIGITS = "1.4142135623730950488016887242096980785696718753769480731766797379907324784621"


def params(alpha=SQRT2, beta=0):
    return BeattyParams(alpha=alpha, beta=beta if not isinstance(beta, int) else Rational(p=beta))


FAMILY = [params(a, b) for a in (SQRT2, GOLDEN_RATIO) for b in (0, 1, -2)]


@pytest.fixture(scope="module")
def table():
    return build_mangoldt_table(20_000)


def test_known_terms():
    assert beatty_terms(params(), 10).tolist() == [1, 2, 4, 5, 7, 8, 9, 11, 12, 14]
    assert beatty_terms(params(GOLDEN_RATIO), 10).tolist() == [1, 3, 4, 6, 8, 9, 11, 12, 14, 16]
    assert beatty_term(params(SQRT2, -2), 1) == -1
    with pytest.raises(ParameterError):
        beatty_term(params(), 0)


def test_params_validation():
    with pytest.raises(ValidationError):
        BeattyParams(alpha=Rational(p=3, q=2), beta=Rational(p=0))
    with pytest.raises(ValidationError):
        BeattyParams(alpha=SQRT2.affine(Fraction(1, 2), 0), beta=Rational(p=0))
    assert params().gamma == SQRT2.affine(Fraction(1, 2), 0)
    assert params(SQRT2, 1).delta.compare(0) == 0


@pytest.mark.parametrize("p", FAMILY, ids=str)
def test_membership_agrees_with_enumeration(p):
    terms = set(beatty_terms(p, 2000).tolist())
    m = np.arange(1, 2000)
    expected = np.array([v in terms for v in m])
    assert np.array_equal(member_mask(p, m), expected)
    assert all(is_member(p, int(v)) == (v in terms) for v in m[:200])


def test_membership_form_is_built_once_per_params():
    p = params(GOLDEN_RATIO, 3)
    assert p.membership_form() is p.membership_form()
    assert p.membership_form(shift=1) is params(GOLDEN_RATIO, 3).membership_form(shift=1)
    assert p.membership_form() is not p.membership_form(shift=1)
    m = np.arange(1, 5000)
    assert [is_member(p, int(v)) for v in m] == member_mask(p, m).tolist()


def test_criterion_mask_admits_nonpositive_indices():
    p = params(SQRT2, 1)
    # n = 0 lands on ⌊β⌋ = 1
    assert criterion_mask(p, np.array([1]))[0]
    assert not is_member(p, 1)


def test_recover_index_inverts_terms():
    p = params(GOLDEN_RATIO, 1)
    for n, m in enumerate(beatty_terms(p, 300).tolist(), start=1):
        assert recover_index(p, m) == n


def test_decimal_alpha_uses_scalar_path():
    exact = params()
    approx = params(DecimalLiteral(digits=SQRT2_DIGITS))
    assert [is_member(approx, m) for m in range(1, 300)] == [is_member(exact, m) for m in range(1, 300)]


@pytest.mark.parametrize("p", FAMILY, ids=str)
def test_hit_counts_match_membership(p):
    m = np.arange(1, 5000)
    assert np.array_equal(hit_counts(p, m), member_mask(p, m).astype(np.int64))


def test_hit_count_conventions():
    p = params(SQRT2, 1)
    # n = 0 lands on m = β, where (m−β)/α is an integer and the identity gives 0
    assert hit_count(p, 1) == 0
    assert floor_difference(p, np.array([1]))[0] == 0
    assert not is_member(p, 1)
    assert floor_difference(p, np.array([2, 3]))[0] == 1
    with pytest.raises(DomainError):
        hit_count(params(SQRT2, Rational(p=3, q=10)), 5)
    with pytest.raises(ParameterError):
        hit_count(p, 0)


@pytest.mark.parametrize("p", FAMILY, ids=str)
def test_hit_counts_partition_the_index_range(p):
    b = int(p.beta.floor())
    for N in (1, 2, 7, 100, 1000, 10_000):
        top = beatty_term(p, N)
        m = np.arange(b + 1, top + 1, dtype=np.int64)
        assert int(hit_counts(p, m).sum()) == N
        # terms ≤ 0 (only for β < 0) fall outside m ≥ 1
        non_positive = int(np.sum(beatty_terms(p, N) <= 0))
        assert int(hit_counts(p, m[m >= 1]).sum()) == N - non_positive
        if b >= 0:
            assert non_positive == 0


def test_hit_count_sum_over_positive_m():
    p = params(SQRT2, 0)
    N = 500
    assert sum(hit_count(p, m) for m in range(1, beatty_term(p, N) + 1)) == N


@pytest.mark.parametrize("c, d", [(0, 1), (1, 2), (1, 3), (2, 5)])
def test_identity_matches_enumeration_exactly(table, c, d):
    for p in FAMILY:
        a = beatty_lambda_sum(table, p, 20_000, c, d, "enumeration")
        b = beatty_lambda_sum(table, p, 20_000, c, d, "identity")
        assert a == b


def test_enumeration_accepts_real_beta(table):
    p = params(SQRT2, Rational(p=3, q=10))
    total = beatty_lambda_sum(table, p, 20_000, 0, 1, "enumeration")
    # about a 1/√2 share of ψ(20000)
    assert total == pytest.approx(20_000 / 2 ** 0.5, rel=0.02)
    with pytest.raises(DomainError):
        beatty_lambda_sum(table, p, 100, 0, 1, "identity")


def test_lambda_sum_argument_checks(table):
    with pytest.raises(ParameterError):
        beatty_lambda_sum(table, params(), 100, 3, 3)
    with pytest.raises(RangeError):
        beatty_lambda_sum(table, params(), 30_000, 0, 1)


def test_complementary_sequences_partition_integers():
    for alpha in (SQRT2, GOLDEN_RATIO):
        p = params(alpha)
        q = complementary_params(p)
        a = set(beatty_terms(p, 700).tolist())
        b = set(beatty_terms(q, 700).tolist())
        assert not a & b
        assert set(range(1, 500)) <= a | b
    with pytest.raises(DomainError):
        complementary_params(params(SQRT2, 1))


@hsettings(derandomize=True, max_examples=100, deadline=None)
@given(b=st.integers(-5, 5), m=st.integers(1, 10**6))
def test_membership_matches_term_at_recovered_index(b, m):
    p = params(GOLDEN_RATIO, b)
    n = recover_index(p, m)
    assert is_member(p, m) == (n >= 1 and beatty_term(p, n) == m)
