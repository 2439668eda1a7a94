"""Vectorised exact floors of y(n) = s·n + t for s, t in one quadratic field.

y(n) = (A + B·n + (C + E·n)·√D) / Q with integers A, B, C, E, Q > 0.

Floors come from integer square roots, so membership and hit-count decisions
never depend on floating point. Values up to 2^52 use a corrected float
``sqrt`` on int64 arrays; larger arguments fall back to Python integers.
"""
import math
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from tools.realspec import QuadraticIrrational, Rational, RealSpec

_INT64_SAFE = 1 << 52
_ONE_MINUS = np.nextafter(1.0, 0.0)


def _isqrt_array(v: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(v.astype(np.float64))).astype(np.int64)
    for _ in range(2):
        r = np.where(r * r > v, r - 1, r)
        r = np.where((r + 1) * (r + 1) <= v, r + 1, r)
    return r


class LinearForm:
    def __init__(self, A: int, B: int, C: int, E: int, D: int, Q: int):
        if Q <= 0:
            raise ValueError("Q must be positive")
        self.A, self.B, self.C, self.E, self.D, self.Q = A, B, C, E, D, Q

    @classmethod
    def of(cls, slope: RealSpec, intercept: RealSpec) -> Optional["LinearForm"]:
        """Build y(n) = slope·n + intercept, or None if not in one exact field."""
        parts = []
        D = 0
        for x in (slope, intercept):
            if isinstance(x, Rational):
                parts.append((Fraction(x.p, x.q), Fraction(0)))
            elif isinstance(x, QuadraticIrrational):
                if D and D != x.D:
                    return None
                D = x.D
                parts.append((Fraction(x.p, x.q), Fraction(x.r, x.q)))
            else:
                return None
        (sp, sr), (tp, tr) = parts
        Q = math.lcm(sp.denominator, sr.denominator, tp.denominator, tr.denominator)
        return cls(
            A=int(tp * Q), B=int(sp * Q), C=int(tr * Q), E=int(sr * Q), D=D, Q=Q,
        )

    def _fits_int64(self, n: np.ndarray) -> bool:
        if len(n) == 0:
            return True
        lo, hi = int(n.min()), int(n.max())
        r_max = max(abs(self.C + self.E * lo), abs(self.C + self.E * hi))
        p_max = max(abs(self.A + self.B * lo), abs(self.A + self.B * hi))
        return r_max * r_max * max(self.D, 1) < _INT64_SAFE and p_max + r_max * (math.isqrt(self.D) + 1) < _INT64_SAFE

    def floor_and_frac(self, n: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(⌊y(n)⌋, {y(n)}) with exact floors; fractions in [0, 1) to ~1e-16."""
        n = np.asarray(n, dtype=np.int64)
        if self._fits_int64(n):
            return self._floor_and_frac_int64(n)
        return self._floor_and_frac_object(n)

    def floor(self, n: np.ndarray) -> np.ndarray:
        return self.floor_and_frac(n)[0]

    def frac(self, n: np.ndarray) -> np.ndarray:
        return self.floor_and_frac(n)[1]

    def is_integer(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        R = self.C + self.E * n
        num = self.A + self.B * n
        return (R == 0) & (num % self.Q == 0)

    def _floor_and_frac_int64(self, n: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        R = self.C + self.E * n
        num = self.A + self.B * n
        if self.D == 0 or not np.any(R):
            k = num // self.Q
            return k, (num - k * self.Q) / self.Q
        v = R * R * self.D
        root = _isqrt_array(v)
        sqrt_v = np.sqrt(v.astype(np.float64))
        # s = |R|√D − root in [0, 1), evaluated without cancellation
        s = (v - root * root) / np.where(sqrt_v + root > 0, sqrt_v + root, 1.0)
        t = np.where(R > 0, root, np.where(R < 0, -root - 1, 0))
        s = np.where(R > 0, s, np.where(R < 0, 1.0 - s, 0.0))
        k = (num + t) // self.Q
        j = num + t - k * self.Q
        frac = np.minimum((j + s) / self.Q, _ONE_MINUS)
        return k, frac

    def _floor_and_frac_object(self, n: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        k_out = np.empty(len(n), dtype=object)
        f_out = np.empty(len(n), dtype=np.float64)
        for i, m in enumerate(n.tolist()):
            R = self.C + self.E * m
            num = self.A + self.B * m
            if R == 0 or self.D == 0:
                t, s = 0, 0.0
            else:
                v = R * R * self.D
                root = math.isqrt(v)
                s = (v - root * root) / (math.sqrt(v) + root)
                t, s = (root, s) if R > 0 else (-root - 1, 1.0 - s)
            k, j = divmod(num + t, self.Q)
            k_out[i] = k
            f_out[i] = min((j + s) / self.Q, _ONE_MINUS)
        try:
            k_out = k_out.astype(np.int64)
        except OverflowError:
            pass
        return k_out, f_out
