"""Λ-weighted exponential sums over arithmetic progressions, and the discrepancy
of the sequence {αm + β}.

Phases θn are reduced modulo 1 before the complex exponential. Quadratic and
rational θ go through the exact ``LinearForm`` fractional part. Any other θ is
rounded once to a 78-bit binary fraction split into three 26-bit limbs, so
that each limb product stays inside int64 for n < 2^36.
"""
import logging
import math
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from config.settings import settings
from tools.beatty import BeattyParams
from tools.discrepancy import DiscrepancyResult, discrepancy_exact
from tools.errors import DomainError, ParameterError, PrecisionExhaustedError, RangeError
from tools.linear_form import LinearForm
from tools.mangoldt import MangoldtTable
from tools.realspec import DecimalLiteral, Rational, RealSpec
from tools.summation import CompensatedSum, chunk_sum

logger = logging.getLogger(__name__)

Theta = Union[float, int, Fraction, RealSpec]

_LIMB = 26
_LIMB_MASK = (1 << _LIMB) - 1
_LIMB_BITS = 3 * _LIMB
_MAX_N = 1 << 36
_PHASE_TOLERANCE = 1e-9


# --- Data Models ---
class ExpSumResult(BaseModel):
    real: float = Field(..., description="Re Σ Λ(n) e(θn)")
    imag: float = Field(..., description="Im Σ Λ(n) e(θn)")
    terms: int = Field(..., description="Number of nonzero Λ contributions")
    x: int = Field(..., description="Upper limit of summation")
    theta: float = Field(..., description="θ as a double, for reporting")
    c: int = Field(..., description="Residue")
    d: int = Field(..., description="Modulus")
    mass: float = Field(..., description="Σ Λ(n) over the same range (triangle-inequality bound)")
    phase_error: float = Field(0.0, description="Upper bound on |θn − reduced θn| over the range")

    @property
    def value(self) -> complex:
        return complex(self.real, self.imag)

    @property
    def modulus(self) -> float:
        return abs(self.value)


# --- Phase reduction ---
class PhaseReducer:
    """n ↦ {θn} for integer arrays n, exact where θ allows it."""

    def __init__(self, theta: Theta):
        self.theta = theta
        self._form: Optional[LinearForm] = None
        self.uncertainty = Fraction(0)  # |θ − θ used|
        if isinstance(theta, RealSpec):
            self._form = LinearForm.of(theta, Rational(p=0))
            if self._form is None:
                lo, hi = theta.enclosure(settings.THETA_PRECISION_BITS)
                value = (lo + hi) / 2
                self.uncertainty = (hi - lo) / 2
            else:
                value = None
        elif isinstance(theta, (int, Fraction)):
            value = Fraction(theta)
        elif isinstance(theta, float):
            if not math.isfinite(theta):
                raise ParameterError("theta must be finite")
            value = Fraction(theta)
        else:
            raise ParameterError(f"unsupported phase type {type(theta).__name__}")
        if value is not None:
            value -= math.floor(value)
            scaled = math.floor(value * (1 << _LIMB_BITS))
            self.uncertainty += value - Fraction(scaled, 1 << _LIMB_BITS)
            self.limbs = (scaled >> (2 * _LIMB), (scaled >> _LIMB) & _LIMB_MASK, scaled & _LIMB_MASK)

    @property
    def exact(self) -> bool:
        return self._form is not None

    def error_bound(self, n_max: int) -> float:
        """Bound on the phase error for |n| ≤ n_max (ignoring the final double rounding)."""
        return float(self.uncertainty * n_max)

    def check(self, n_max: int) -> None:
        if self.exact:
            return
        if n_max >= _MAX_N:
            raise RangeError(f"phase reduction supports n < 2^36, got {n_max}")
        if self.error_bound(n_max) > _PHASE_TOLERANCE:
            raise PrecisionExhaustedError(
                f"theta is known to {float(self.uncertainty):.3g}, too coarse for n up to {n_max}"
            )

    def __call__(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        if self._form is not None:
            return self._form.frac(n)
        a1, a2, a3 = self.limbs
        f = (np.mod(a1 * n, 1 << _LIMB) / float(1 << _LIMB)
             + np.mod(a2 * n, 1 << (2 * _LIMB)) / float(1 << (2 * _LIMB))
             + (a3 * n) / float(1 << _LIMB_BITS))
        return np.mod(f, 1.0)


def reduced_phase(theta: Theta, n: np.ndarray) -> np.ndarray:
    """{θn} in [0, 1) for an integer array n."""
    reducer = PhaseReducer(theta)
    n = np.asarray(n, dtype=np.int64)
    if len(n):
        reducer.check(int(np.max(np.abs(n))))
    return reducer(n)


def _theta_float(theta: Theta) -> float:
    return float(theta)


# --- Sums ---
def _check_progression(table: MangoldtTable, x: int, c: int, d: int) -> None:
    if d < 1 or not 0 <= c < d:
        raise ParameterError("require 0 ≤ c < d")
    if x > table.limit:
        raise RangeError(f"x={x} exceeds table limit {table.limit}")


def _phase_sum(table: MangoldtTable, start: int, stop: int, c: int, d: int,
               phase: Callable[[np.ndarray], np.ndarray]):
    """Σ Λ(n)e(phase(n)) over start ≤ n < stop, n ≡ c (mod d); returns (value, terms, mass)."""
    def chunk(lo: int, lam: np.ndarray):
        first = (c - lo) % d
        weights = lam[first::d]
        n = np.arange(lo + first, lo + len(lam), d, dtype=np.int64)
        keep = weights != 0.0
        weights, n = weights[keep], n[keep]
        angle = 2.0 * np.pi * phase(n)
        return (chunk_sum(weights * np.cos(angle)), chunk_sum(weights * np.sin(angle)),
                int(len(n)), chunk_sum(weights))

    re, im, mass = CompensatedSum(), CompensatedSum(), CompensatedSum()
    terms = 0
    for r, i, t, m in table.map_chunks(chunk, max(start, 1), stop):
        re.add(r)
        im.add(i)
        mass.add(m)
        terms += t
    return complex(re.value, im.value), terms, mass.value


def twisted_sum(table: MangoldtTable, x: int, theta: Theta, c: int, d: int) -> ExpSumResult:
    """Σ_{n≤x, n≡c (mod d)} Λ(n) e(θn)."""
    _check_progression(table, x, c, d)
    reducer = PhaseReducer(theta)
    reducer.check(x)
    value, terms, mass = _phase_sum(table, 1, x + 1, c, d, reducer)
    return ExpSumResult(real=value.real, imag=value.imag, terms=terms, x=x, theta=_theta_float(theta), c=c, d=d,
                        mass=mass, phase_error=reducer.error_bound(x))


def lemma23_bound(x: float, q: int) -> float:
    """(q^{-1/2}x + q^{1/2}x^{1/2} + x^{4/5})(log x)^3 with implied constant 1."""
    if x <= 1:
        raise DomainError("x must exceed 1")
    if q < 1:
        raise ParameterError("q must be a positive integer")
    return (x / math.sqrt(q) + math.sqrt(q * x) + x ** 0.8) * math.log(x) ** 3


def _frequency(gamma: Theta, k: int, d: int = 1) -> Theta:
    if isinstance(gamma, RealSpec):
        return gamma.affine(Fraction(k, d), 0)
    if isinstance(gamma, float):
        return gamma * k / d
    return Fraction(gamma) * k / d


def progression_twisted_sum(table: MangoldtTable, M: int, d: int, c: int, gamma: Theta, k: int) -> ExpSumResult:
    """Σ_{m≤M} Λ(dm+c) e(γkm)."""
    x = d * M + c
    _check_progression(table, x, c, d)
    theta = _frequency(gamma, k)
    reducer = PhaseReducer(theta)
    reducer.check(M)
    value, terms, mass = _phase_sum(table, d + c, x + 1, c, d, lambda n: reducer((n - c) // d))
    return ExpSumResult(real=value.real, imag=value.imag, terms=terms, x=M, theta=_theta_float(theta), c=c, d=d,
                        mass=mass, phase_error=reducer.error_bound(M))


def reindexed_progression_sum(table: MangoldtTable, M: int, d: int, c: int, gamma: Theta, k: int) -> complex:
    """The same sum through n = dm + c and ϑ = γk/d:

    e(−ϑc)·(Σ_{n≤dM+c, n≡c (mod d)} Λ(n)e(ϑn) − Λ(c)e(ϑc)),

    the subtracted term being the m = 0 contribution (present only for c ≥ 1).
    """
    vartheta = _frequency(gamma, k, d)
    full = twisted_sum(table, d * M + c, vartheta, c, d).value
    shift = np.exp(2j * np.pi * float(reduced_phase(vartheta, np.array([c]))[0]))
    if c >= 1:
        full -= table.mangoldt(c) * shift
    return complex(full / shift)


# --- Discrepancy of {αm + β} ---
def fractional_parts(alpha: RealSpec, beta: RealSpec, M: int) -> np.ndarray:
    """{αm + β} for m = 1..M."""
    if M < 1:
        raise ParameterError("M must be at least 1")
    m = np.arange(1, M + 1, dtype=np.int64)
    form = LinearForm.of(alpha, beta)
    if form is not None:
        return form.frac(m)
    for x in (alpha, beta):
        if isinstance(x, DecimalLiteral) and float(x.radius) * M > _PHASE_TOLERANCE:
            raise PrecisionExhaustedError(f"{x} is too coarse for M={M}")
    slope = reduced_phase(alpha, m)
    lo, hi = beta.enclosure(settings.THETA_PRECISION_BITS)
    shift = (lo + hi) / 2
    shift -= math.floor(shift)
    return np.mod(slope + float(shift), 1.0)


def sequence_discrepancy(alpha: RealSpec, beta: RealSpec, M: int) -> DiscrepancyResult:
    """Discrepancy of {αm + β}, m ≤ M, for any real α (rational α allowed)."""
    return discrepancy_exact(fractional_parts(alpha, beta, M))


def beatty_discrepancy(params: BeattyParams, M: int) -> DiscrepancyResult:
    """D_{α,β}(M)."""
    return sequence_discrepancy(params.alpha, params.beta, M)
