import math
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from tools.errors import CapacityError, ParameterError, RangeError
from tools.mangoldt import build_mangoldt_table, chebyshev_sum, simple_primes, smallest_prime_factors
from tools.summation import CompensatedSum, chunk_sum, compensated_sum, merge_partials


def naive_mangoldt(n):
    if n < 2:
        return 0.0
    p = next(k for k in range(2, n + 1) if n % k == 0)
    while n % p == 0:
        n //= p
    return math.log(p) if n == 1 else 0.0


@pytest.fixture(scope="module")
def table():
    return build_mangoldt_table(10_000)


def test_small_values(table):
    assert table.mangoldt(1) == 0.0
    assert table.mangoldt(2) == math.log(2)
    assert table.mangoldt(8) == math.log(2)
    assert table.mangoldt(9) == math.log(3)
    assert table.mangoldt(12) == 0.0
    assert table.smallest_prime_factor(91) == 7


def test_values_match_naive(table):
    lam = table.values(0, 2000)
    expected = np.array([naive_mangoldt(n) for n in range(2000)])
    np.testing.assert_allclose(lam, expected, rtol=1e-15, atol=0)


def test_lambda_at_arbitrary_indices(table):
    idx = np.array([0, 1, 2, 4, 6, 7, 25, 27, 9973, 9991])
    expected = np.array([naive_mangoldt(int(n)) for n in idx])
    np.testing.assert_allclose(table.lambda_at(idx), expected, rtol=1e-15, atol=0)


def test_range_errors(table):
    with pytest.raises(RangeError):
        table.mangoldt(10_001)
    with pytest.raises(RangeError):
        table.values(0, 10_002)
    with pytest.raises(RangeError):
        chebyshev_sum(table, 20_000, 0, 1)


def test_segmented_table_agrees_with_resident(monkeypatch):
    from config.settings import settings

    monkeypatch.setattr(settings, "SIEVE_SEGMENT_SIZE", 1000)
    resident = build_mangoldt_table(20_000)
    segmented = build_mangoldt_table(20_000, memory_budget=1024)
    assert segmented.segmented and not resident.segmented
    assert np.array_equal(resident.values(1, 20_001), segmented.values(1, 20_001))
    idx = np.array([2, 999, 1000, 1001, 4096, 19_997, 19_999])
    assert np.array_equal(resident.lambda_at(idx), segmented.lambda_at(idx))
    assert chebyshev_sum(resident, 20_000, 1, 4) == chebyshev_sum(segmented, 20_000, 1, 4)


def test_budget_without_segmentation_raises():
    with pytest.raises(CapacityError):
        build_mangoldt_table(10_000, memory_budget=100, allow_segmented=False)


def test_chebyshev_psi_and_progressions(table):
    psi = chebyshev_sum(table, 10_000, 0, 1)
    # ψ(10^4) = 10013.3921...
    assert psi == pytest.approx(10013.39, abs=0.01)
    parts = [chebyshev_sum(table, 10_000, c, 3) for c in range(3)]
    assert sum(parts) == pytest.approx(psi, rel=1e-14)


def test_chebyshev_small_cases(table):
    assert chebyshev_sum(table, 10, 0, 1) == pytest.approx(math.log(2520), rel=1e-14)
    assert chebyshev_sum(table, 10, 1, 4) == pytest.approx(math.log(15), rel=1e-14)
    assert chebyshev_sum(table, 1, 0, 1) == 0.0
    with pytest.raises(ParameterError):
        chebyshev_sum(table, 10, 4, 4)


def test_chebyshev_matches_log_lcm(table):
    checkpoints = set(range(1, 10_001, 37)) | {2, 3, 4, 9, 10_000}
    lcm = 1
    for x in range(1, 10_001):
        lcm = math.lcm(lcm, x)
        if x in checkpoints:
            assert chebyshev_sum(table, x, 0, 1) == pytest.approx(math.log(lcm), rel=1e-9)


def test_chebyshev_is_non_decreasing(table):
    values = [chebyshev_sum(table, x, 0, 1) for x in range(1, 400)]
    values += [chebyshev_sum(table, x, 1, 3) for x in range(400, 10_001, 250)]
    assert all(b >= a for a, b in zip(values[:399], values[1:399]))
    tail = values[399:]
    assert all(b >= a for a, b in zip(tail, tail[1:]))


def test_stats_counts_primes(table):
    stats = table.stats()
    assert stats["prime_count"] == 1229
    assert stats["limit"] == 10_000


def test_sieve_helpers():
    assert simple_primes(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert smallest_prime_factors(12).tolist() == [0, 1, 2, 3, 2, 5, 2, 7, 2, 3, 2, 11, 2]


def test_map_chunks_independent_of_threads(monkeypatch):
    from config.settings import settings

    monkeypatch.setattr(settings, "SIEVE_SEGMENT_SIZE", 512)
    small = build_mangoldt_table(10_000)
    one = small.map_chunks(lambda lo, lam: chunk_sum(lam), 1, 10_001, threads=1)
    many = small.map_chunks(lambda lo, lam: chunk_sum(lam), 1, 10_001, threads=4)
    assert one == many
    assert merge_partials(one) == merge_partials(many)


def test_compensated_sum_recovers_cancellation():
    values = [1e16, 1.0, -1e16] * 1000
    assert compensated_sum(values) == 1000.0
    acc = CompensatedSum()
    acc.add_array(np.array([0.1] * 10))
    assert acc.value == 1.0
