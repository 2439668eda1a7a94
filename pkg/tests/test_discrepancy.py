import os
import sys

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from pydantic import ValidationError

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from tools.discrepancy import (
    BRUTE_FORCE_LIMIT,
    DiscrepancyResult,
    WitnessInterval,
    discrepancy_bruteforce,
    discrepancy_exact,
)
from tools.errors import DomainError, ParameterError, SizeError


def witness_gap(points, result):
    inside = sum(result.witness.contains(float(x)) for x in points)
    length = result.witness.right - result.witness.left
    return abs(inside / len(points) - length)


def test_single_point_has_full_discrepancy():
    assert discrepancy_exact([0.3]).value == 1.0


def test_equally_spaced_points():
    M = 50
    result = discrepancy_exact(np.arange(M) / M)
    assert result.value == pytest.approx(1 / M)


def test_clustered_points():
    result = discrepancy_exact([0.1, 0.1, 0.1, 0.1])
    assert result.value == pytest.approx(1.0)
    assert result.witness.left == result.witness.right == 0.1
    assert result.witness.left_closed and result.witness.right_closed


def test_gap_witness_is_open():
    points = [0.0, 0.05, 0.9, 0.95]
    result = discrepancy_exact(points)
    assert result.value == pytest.approx(0.85)
    assert not result.witness.left_closed and not result.witness.right_closed
    assert witness_gap(points, result) == pytest.approx(result.value)


def test_matches_bruteforce_on_random_sets():
    rng = np.random.default_rng(0)
    for _ in range(200):
        pts = rng.random(int(rng.integers(1, 501)))
        assert abs(discrepancy_exact(pts).value - discrepancy_bruteforce(pts)) <= 1e-12


@hsettings(derandomize=True, max_examples=200)
@given(st.lists(st.floats(0.0, 1.0, exclude_max=True), min_size=1, max_size=60))
def test_closed_form_and_oracle_agree(points):
    result = discrepancy_exact(points)
    assert abs(result.value - discrepancy_bruteforce(points)) <= 1e-12
    assert witness_gap(points, result) == pytest.approx(result.value, abs=1e-12)


def test_input_validation():
    with pytest.raises(ParameterError):
        discrepancy_exact([])
    with pytest.raises(DomainError):
        discrepancy_exact([0.2, 1.0])
    with pytest.raises(DomainError):
        discrepancy_exact([-0.1])
    with pytest.raises(SizeError):
        discrepancy_bruteforce(np.zeros(BRUTE_FORCE_LIMIT + 1))


def test_result_range_is_enforced():
    witness = WitnessInterval(left=0.0, right=0.5)
    with pytest.raises(ValidationError):
        DiscrepancyResult(M=10, value=0.01, witness=witness)
    assert DiscrepancyResult(M=10, value=0.1, witness=witness).value == 0.1


def test_witness_contains_respects_endpoints():
    open_interval = WitnessInterval(left=0.2, right=0.4, left_closed=False, right_closed=False)
    assert not open_interval.contains(0.2) and open_interval.contains(0.3)
    assert WitnessInterval(left=0.2, right=0.4).contains(0.4)
