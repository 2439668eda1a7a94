"""Extreme discrepancy of a finite point set in [0, 1).

D(M) = sup_I |V(I, M)/M − |I||, the supremum over subintervals I of [0, 1).
"""
import logging
from typing import Iterable, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from tools.errors import DomainError, ParameterError, SizeError

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 2000


class WitnessInterval(BaseModel):
    left: float
    right: float
    left_closed: bool = True
    right_closed: bool = True

    def contains(self, x: float) -> bool:
        above = x >= self.left if self.left_closed else x > self.left
        below = x <= self.right if self.right_closed else x < self.right
        return above and below


class DiscrepancyResult(BaseModel):
    M: int = Field(..., description="Number of points")
    value: float = Field(..., description="Extreme discrepancy, in [1/M, 1]")
    witness: WitnessInterval = Field(..., description="Interval attaining the supremum")

    @model_validator(mode="after")
    def _range(self):
        if not 1.0 / self.M - 1e-12 <= self.value <= 1.0 + 1e-12:
            raise ValueError(f"discrepancy {self.value} outside [1/M, 1]")
        return self


def _as_points(points: Union[Iterable[float], np.ndarray]) -> np.ndarray:
    x = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=np.float64)
    if x.ndim != 1 or len(x) == 0:
        raise ParameterError("at least one point is required")
    if np.any(x < 0.0) or np.any(x >= 1.0) or not np.all(np.isfinite(x)):
        raise DomainError("points must lie in [0, 1)")
    return x


def discrepancy_exact(points) -> DiscrepancyResult:
    """Closed form over the sorted points: 1/M + max(i/M − x_i) − min(i/M − x_i)."""
    x = np.sort(_as_points(points))
    M = len(x)
    v = np.arange(1, M + 1, dtype=np.float64) / M - x
    i = int(np.flatnonzero(v == v.max())[-1])
    j = int(np.argmin(v))
    value = min(max(1.0 / M + v[i] - v[j], 1.0 / M), 1.0)
    if i >= j:
        # points j..i inside a closed interval: surplus of points
        witness = WitnessInterval(left=float(x[j]), right=float(x[i]))
    else:
        # gap strictly between x_i and x_j: deficit of points
        witness = WitnessInterval(left=float(x[i]), right=float(x[j]), left_closed=False, right_closed=False)
    return DiscrepancyResult(M=M, value=value, witness=witness)


def discrepancy_bruteforce(points) -> float:
    """Maximise |V/M − |I|| over every interval with endpoints in the points ∪ {0, 1},
    each endpoint open or closed."""
    x = np.sort(_as_points(points))
    M = len(x)
    if M > BRUTE_FORCE_LIMIT:
        raise SizeError(f"brute force is limited to {BRUTE_FORCE_LIMIT} points, got {M}")
    ends = np.unique(np.concatenate([x, [0.0, 1.0]]))
    below = np.searchsorted(x, ends, side="left")    # points < e
    upto = np.searchsorted(x, ends, side="right")   # points ≤ e
    a, b = np.meshgrid(np.arange(len(ends)), np.arange(len(ends)), indexing="ij")
    valid = b >= a
    length = ends[b] - ends[a]
    best = 0.0
    counts = (
        upto[b] - below[a],  # [a, b]
        upto[b] - upto[a],  # (a, b]
        below[b] - below[a],  # [a, b)
        below[b] - upto[a],  # (a, b)
    )
    for V in counts:
        gap = np.abs(np.maximum(V, 0) / M - length)
        best = max(best, float(np.max(gap[valid])))
    return best
