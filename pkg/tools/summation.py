"""Compensated accumulation for long Λ-weighted sums.

Each chunk is reduced with ``math.fsum`` (correctly rounded), and chunk
partials are merged with Neumaier's variant of Kahan summation in chunk
order. Chunk boundaries come from the sieve segment size, never from the
thread count, so results do not depend on how many workers ran.
"""
import math
from typing import Iterable

import numpy as np


class CompensatedSum:
    def __init__(self, value: float = 0.0):
        self.total = 0.0
        self.compensation = 0.0
        if value:
            self.add(value)

    def add(self, value: float) -> None:
        value = float(value)
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.compensation += (self.total - t) + value
        else:
            self.compensation += (value - t) + self.total
        self.total = t

    def add_array(self, values: np.ndarray) -> None:
        if len(values):
            self.add(math.fsum(values.tolist()))

    def merge(self, other: "CompensatedSum") -> None:
        self.add(other.total)
        self.add(other.compensation)

    @property
    def value(self) -> float:
        return self.total + self.compensation


def compensated_sum(values: Iterable[float]) -> float:
    acc = CompensatedSum()
    for v in values:
        acc.add(v)
    return acc.value


def merge_partials(partials: Iterable[float]) -> float:
    """Merge per-chunk partial sums in the given (fixed) order."""
    return compensated_sum(partials)


def chunk_sum(values: np.ndarray) -> float:
    """Correctly rounded sum of one chunk."""
    return math.fsum(values.tolist()) if len(values) else 0.0
