"""Continued fractions, convergents and Dirichlet-type rational approximation."""
import logging
import math
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple, Union

import mpmath
from pydantic import BaseModel, Field, field_validator, model_validator

from config.settings import settings
from tools.errors import DomainError, ParameterError, PrecisionExhaustedError
from tools.realspec import DecimalLiteral, QuadraticIrrational, Rational, RealSpec, require_irrational

logger = logging.getLogger(__name__)


# --- Data Models ---
class RationalApprox(BaseModel):
    a: int = Field(..., description="Numerator")
    q: int = Field(..., description="Positive denominator")
    err: float = Field(..., description="|target − a/q|")

    @model_validator(mode="after")
    def _coprime(self):
        if self.q <= 0:
            raise ValueError("denominator must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"{self.a}/{self.q} is not in lowest terms")
        return self

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.a, self.q)


class TypeEstimate(BaseModel):
    tau_hat: float = Field(..., description="Estimated irrationality type, ≥ 1")
    depth: int = Field(..., description="Number of convergents used")
    exact: bool = Field(..., description="True when the type is known exactly")

    @field_validator("tau_hat")
    @classmethod
    def _dirichlet_floor(cls, v: float) -> float:
        if v < 1.0:
            raise ValueError("tau_hat must be at least 1")
        return v


# --- Continued fractions ---
def _decimal_quotients(x: DecimalLiteral) -> Iterator[int]:
    lo, hi = x.enclosure()
    while True:
        a, b = math.floor(lo), math.floor(hi)
        if a != b:
            raise PrecisionExhaustedError(f"{x.bits}-bit literal cannot certify the next partial quotient")
        yield a
        lo, hi = lo - a, hi - a
        if lo <= 0:
            # the enclosure touches an integer: the expansion may have ended
            raise PrecisionExhaustedError(f"{x.bits}-bit literal cannot certify the next partial quotient")
        lo, hi = 1 / hi, 1 / lo


def iter_partial_quotients(x: RealSpec) -> Iterator[int]:
    """Yield partial quotients a0, a1, ... (finite for rationals)."""
    if isinstance(x, Rational):
        p, q = x.p, x.q
        while q:
            a, r = divmod(p, q)
            yield a
            p, q = q, r
        return
    if isinstance(x, DecimalLiteral):
        yield from _decimal_quotients(x)
        return
    # exact periodic expansion: x_{i+1} = 1/(x_i − a_i) stays in the same field
    while True:
        a = x.floor()
        yield a
        x = x.affine(1, -a).reciprocal()


def continued_fraction(x: RealSpec, k: int) -> List[int]:
    if x.sign() <= 0:
        raise DomainError("continued_fraction requires x > 0")
    quotients = []
    for a in iter_partial_quotients(x):
        quotients.append(a)
        if len(quotients) >= k:
            break
    return quotients


def _approx_error(x: RealSpec, a: int, q: int) -> float:
    if isinstance(x, Rational):
        return float(abs(x.value - Fraction(a, q)))
    with mpmath.workprec(settings.DECIMAL_PRECISION_BITS):
        return float(abs(x.affine(1, -Fraction(a, q)).to_mpf()))


def iter_convergents(x: RealSpec) -> Iterator[Tuple[int, int]]:
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for a in iter_partial_quotients(x):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield p, q


def convergents(x: RealSpec, k: int) -> List[RationalApprox]:
    out = []
    for p, q in iter_convergents(x):
        out.append(RationalApprox(a=p, q=q, err=_approx_error(x, p, q)))
        if len(out) >= k:
            break
    return out


# --- Distances ---
def dist_nearest_integer(x: Union[float, int, Fraction, RealSpec]) -> float:
    """‖x‖, the distance from x to the nearest integer."""
    if isinstance(x, RealSpec):
        n = x.nearest_integer()
        return abs(float(x.affine(1, -n)))
    if isinstance(x, Fraction):
        return float(abs(x - round(x)))
    return abs(x - round(x)) if math.isfinite(x) else float("nan")


def dist_nearest_integer_exact(x: RealSpec) -> RealSpec:
    n = x.nearest_integer()
    d = x.affine(1, -n)
    return d if d.sign() >= 0 else d.affine(-1, 0)


# --- Dirichlet approximation ---
def _best_convergent(target: RealSpec, K: int) -> RationalApprox:
    best: Optional[Tuple[int, int]] = None
    for p, q in iter_convergents(target):
        if q > K:
            break
        best = (p, q)
    return RationalApprox(a=best[0], q=best[1], err=_approx_error(target, *best))


def dirichlet_approx(alpha: RealSpec, w: int, K: int) -> RationalApprox:
    """Largest-denominator convergent a/q of αw with q ≤ K; |αw − a/q| ≤ 1/(qK)."""
    return dirichlet_approx_mod(alpha, w, 1, K)


def dirichlet_approx_mod(alpha: RealSpec, w: int, d: int, K: int) -> RationalApprox:
    """Largest-denominator convergent a/q of αw/d with q ≤ K; |αw/d − a/q| ≤ 1/(qK)."""
    require_irrational(alpha)
    if w < 1 or d < 1:
        raise ParameterError("w and d must be positive integers")
    if K < 2:
        raise ParameterError("K must be at least 2")
    return _best_convergent(alpha.affine(Fraction(w, d), 0), K)


def satisfies_dirichlet(target: RealSpec, approx: RationalApprox, K: int) -> bool:
    """Exact check of |target − a/q| ≤ 1/(qK)."""
    slack = Fraction(1, approx.q * K)
    return (target.compare(approx.fraction + slack) <= 0
            and target.compare(approx.fraction - slack) >= 0)


def lower_range_bound(K: int, w: int, d: int, tau: float, eps: float) -> float:
    """(K/d)^{1/τ−ε}·w^{-1}, the denominator floor claimed for the approximation."""
    return (K / d) ** (1.0 / tau - eps) / w


# --- Irrationality type ---
def estimate_type(alpha: RealSpec, depth: int) -> TypeEstimate:
    """Lower estimate of τ from 1 + max log a_{k+1} / log q_k over the first convergents."""
    require_irrational(alpha)
    if isinstance(alpha, QuadraticIrrational):
        return TypeEstimate(tau_hat=1.0, depth=depth, exact=True)
    quotients = []
    for a in iter_partial_quotients(alpha):
        quotients.append(a)
        if len(quotients) > depth:
            break
    if len(quotients) < depth + 1:
        raise PrecisionExhaustedError(f"only {len(quotients)} partial quotients certified, need {depth + 1}")
    tau_hat = 1.0
    q_prev, q = 1, 0
    for i in range(depth):
        q_prev, q = q, quotients[i] * q + q_prev
        if q > 1:
            tau_hat = max(tau_hat, 1.0 + math.log(quotients[i + 1]) / math.log(q))
    logger.debug("estimate_type depth=%d tau_hat=%.6f", depth, tau_hat)
    return TypeEstimate(tau_hat=tau_hat, depth=depth, exact=False)


def type_bound_margin(alpha: RealSpec, tau: float, eps: float, count: int) -> float:
    """min over the first convergent denominators q of q^{τ+ε−1}·q‖qα‖.

    A positive floor is the testable consequence of α having type τ.
    """
    margin = math.inf
    for p, q in iter_convergents(alpha):
        dist = dist_nearest_integer(alpha.affine(q, 0))
        margin = min(margin, q ** (tau + eps - 1) * q * dist)
        count -= 1
        if count <= 0:
            break
    return margin


def is_type_bound_satisfied(alpha: RealSpec, tau: float, q_max: int, eps: Optional[float] = None) -> bool:
    """q^{τ+ε−1}·q‖qα‖ stays bounded below (by 1/3 of its first value) over convergents q ≤ q_max."""
    eps = settings.EPSILON if eps is None else eps
    values = []
    for p, q in iter_convergents(alpha):
        if q > q_max:
            break
        values.append(q ** (tau + eps - 1) * q * dist_nearest_integer(alpha.affine(q, 0)))
    return bool(values) and min(values) >= values[0] / 3.0
