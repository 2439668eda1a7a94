"""Von Mangoldt table backed by a smallest-prime-factor sieve.

Below the memory budget the table keeps the full smallest-prime-factor array
resident. Above it only the base primes up to √N are kept and Λ is produced
segment by segment (segmented sieve of Eratosthenes).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Tuple, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.settings import settings
from tools.errors import CapacityError, ParameterError, RangeError
from tools.summation import CompensatedSum, chunk_sum

logger = logging.getLogger(__name__)

T = TypeVar("T")


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] for 0 ≤ n ≤ limit, with spf[0] = 0 and spf[1] = 1."""
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            view = spf[p * p:: p]
            view[view == 0] = p
    unmarked = np.flatnonzero(spf == 0)
    spf[unmarked] = unmarked.astype(np.uint32)
    spf[0] = 0
    if limit >= 1:
        spf[1] = 1
    return spf


def simple_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p:: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _prime_powers(base_primes: np.ndarray, limit: int) -> Tuple[np.ndarray, np.ndarray]:
    """Prime powers p^k ≤ limit with k ≥ 2, sorted, with their log p."""
    values: List[int] = []
    logs: List[float] = []
    for p in base_primes.tolist():
        pk = p * p
        while pk <= limit:
            values.append(pk)
            logs.append(math.log(p))
            pk *= p
    order = np.argsort(values, kind="stable")
    return np.asarray(values, dtype=np.int64)[order], np.asarray(logs, dtype=np.float64)[order]


class MangoldtTable(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    limit: int = Field(..., description="N: Λ(n) is answered for 1 ≤ n ≤ N")
    segmented: bool = Field(..., description="True when only base primes are resident")
    segment_size: int = Field(..., description="Chunk length for iteration and segmented sieving")
    spf: Optional[np.ndarray] = Field(None, description="Smallest prime factor of n (resident mode)")
    base_primes: np.ndarray = Field(..., description="Primes up to √N")
    prime_powers: np.ndarray = Field(..., description="Prime powers p^k ≤ N, k ≥ 2")
    prime_power_logs: np.ndarray = Field(..., description="log p for each entry of prime_powers")

    @property
    def resident_bytes(self) -> int:
        arrays = [self.base_primes, self.prime_powers, self.prime_power_logs]
        if self.spf is not None:
            arrays.append(self.spf)
        return sum(a.nbytes for a in arrays)

    # --- point queries ---
    def mangoldt(self, n: int) -> float:
        """Λ(n), evaluated from the factorisation as the log of an integer."""
        self._check_range(n)
        if n < 2:
            return 0.0
        if self.spf is not None:
            p = int(self.spf[n])
        else:
            p = next((int(b) for b in self.base_primes if n % b == 0), n)
        m = n
        while m % p == 0:
            m //= p
        return math.log(p) if m == 1 else 0.0

    def smallest_prime_factor(self, n: int) -> int:
        self._check_range(n)
        if self.spf is not None:
            return int(self.spf[n])
        return next((int(b) for b in self.base_primes if n % b == 0), n)

    def _check_range(self, n: int) -> None:
        if n > self.limit:
            raise RangeError(f"{n} exceeds table limit {self.limit}")

    # --- vectorised access ---
    def values(self, lo: int, hi: int) -> np.ndarray:
        """Λ(n) for lo ≤ n < hi as float64."""
        lo = max(lo, 0)
        if hi - 1 > self.limit:
            raise RangeError(f"{hi - 1} exceeds table limit {self.limit}")
        if hi <= lo:
            return np.zeros(0, dtype=np.float64)
        n = np.arange(lo, hi, dtype=np.int64)
        if self.spf is not None:
            is_prime = (self.spf[lo:hi].astype(np.int64) == n) & (n >= 2)
        else:
            is_prime = self._segment_primes(lo, hi, n)
        lam = np.where(is_prime, np.log(np.maximum(n, 1)), 0.0)
        a, b = np.searchsorted(self.prime_powers, [lo, hi])
        lam[self.prime_powers[a:b] - lo] = self.prime_power_logs[a:b]
        return lam

    def _segment_primes(self, lo: int, hi: int, n: np.ndarray) -> np.ndarray:
        composite = np.zeros(hi - lo, dtype=bool)
        for p in self.base_primes.tolist():
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            composite[start - lo:: p] = True
        return ~composite & (n >= 2)

    def lambda_at(self, indices: np.ndarray) -> np.ndarray:
        """Λ at arbitrary indices; indices below 2 map to 0."""
        idx = np.asarray(indices, dtype=np.int64)
        if len(idx) and int(idx.max()) > self.limit:
            raise RangeError(f"{int(idx.max())} exceeds table limit {self.limit}")
        out = np.zeros(len(idx), dtype=np.float64)
        valid = idx >= 2
        if self.spf is not None:
            v = idx[valid]
            lam = np.where(self.spf[v].astype(np.int64) == v, np.log(v), 0.0)
            pos = np.searchsorted(self.prime_powers, v)
            pos_c = np.minimum(pos, max(len(self.prime_powers) - 1, 0))
            if len(self.prime_powers):
                hit = self.prime_powers[pos_c] == v
                lam[hit] = self.prime_power_logs[pos_c[hit]]
            out[valid] = lam
            return out
        # segmented: evaluate segment by segment
        positions = np.flatnonzero(valid)
        seg_ids = idx[positions] // self.segment_size
        for seg in np.unique(seg_ids).tolist():
            sel = positions[seg_ids == seg]
            lo = seg * self.segment_size
            hi = min(lo + self.segment_size, self.limit + 1)
            out[sel] = self.values(lo, hi)[idx[sel] - lo]
        return out

    def iter_chunks(self, start: int, stop: int) -> Iterator[Tuple[int, np.ndarray]]:
        """Yield (lo, Λ[lo:hi]) over start ≤ n < stop in fixed segment-aligned chunks."""
        for lo, hi in self.chunk_bounds(start, stop):
            yield lo, self.values(lo, hi)

    def chunk_bounds(self, start: int, stop: int) -> List[Tuple[int, int]]:
        bounds = []
        lo = start
        while lo < stop:
            hi = min((lo // self.segment_size + 1) * self.segment_size, stop)
            bounds.append((lo, hi))
            lo = hi
        return bounds

    def map_chunks(self, fn: Callable[[int, np.ndarray], T], start: int, stop: int,
                   threads: Optional[int] = None) -> List[T]:
        """Apply fn(lo, Λ[lo:hi]) to every chunk; results come back in chunk order."""
        bounds = self.chunk_bounds(start, stop)
        threads = threads or settings.THREADS
        work = lambda b: fn(b[0], self.values(*b))  # noqa: E731
        if threads <= 1 or len(bounds) <= 1:
            return [work(b) for b in bounds]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, bounds))

    def stats(self) -> dict:
        psi = CompensatedSum()
        primes = 0
        for lo, lam in self.iter_chunks(1, self.limit + 1):
            psi.add_array(lam)
            n = np.arange(lo, lo + len(lam), dtype=np.int64)
            primes += int(np.count_nonzero((lam > 0) & (lam == np.log(np.maximum(n, 1)))))
        return {
            "limit": self.limit,
            "segmented": self.segmented,
            "segments": len(self.chunk_bounds(1, self.limit + 1)),
            "resident_bytes": self.resident_bytes,
            "prime_count": primes,
            "chebyshev_psi": psi.value,
        }


def build_mangoldt_table(N: int, memory_budget: Optional[int] = None,
                         allow_segmented: bool = True) -> MangoldtTable:
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > settings.SIEVE_MAX_LIMIT:
        raise CapacityError(f"N={N} exceeds the supported limit {settings.SIEVE_MAX_LIMIT}")
    budget = memory_budget if memory_budget is not None else settings.SIEVE_MEMORY_BUDGET
    resident = 4 * (N + 1) <= budget
    if not resident and not allow_segmented:
        raise CapacityError(f"a resident table for N={N} needs {4 * (N + 1)} bytes, budget is {budget}")

    base = simple_primes(math.isqrt(N))
    powers, logs = _prime_powers(base, N)
    if resident:
        logger.info("Building sieve up to %d (resident)...", N)
        spf = smallest_prime_factors(N)
        spf.setflags(write=False)
    else:
        logger.info("Building sieve up to %d (segmented, %d base primes)...", N, len(base))
        spf = None
    for arr in (base, powers, logs):
        arr.setflags(write=False)
    return MangoldtTable(
        limit=N,
        segmented=not resident,
        segment_size=settings.SIEVE_SEGMENT_SIZE,
        spf=spf,
        base_primes=base,
        prime_powers=powers,
        prime_power_logs=logs,
    )


def chebyshev_sum(table: MangoldtTable, x: int, c: int, d: int) -> float:
    """Σ_{n ≤ x, n ≡ c (mod d)} Λ(n), compensated."""
    if x > table.limit:
        raise RangeError(f"x={x} exceeds table limit {table.limit}")
    if d < 1 or not 0 <= c < d:
        raise ParameterError("require 0 ≤ c < d")

    def chunk(lo: int, lam: np.ndarray) -> float:
        first = (c - lo) % d
        return chunk_sum(lam[first::d])

    acc = CompensatedSum()
    for partial in table.map_chunks(chunk, 1, x + 1):
        acc.add(partial)
    return acc.value

