"""Beatty sequences B_{α,β} = {⌊αn+β⌋ : n ≥ 1}: terms, membership, hit counts.

Conventions
-----------
The sequence is indexed by n ≥ 1. The membership criterion
0 < {γ(m−β+1)} ≤ γ (γ = α⁻¹) also accepts m reached only from n ≤ 0; the
index n = ⌊γ(m−β+1)⌋ is unique, so those m are filtered out.

``hit_count`` follows the same n ≥ 1 convention: for m ≤ β only n ≤ 0 can
land on m, so it returns 0 there; for m > β it is the floor difference
⌊(m−β+1)/α⌋ − ⌊(m−β)/α⌋. ``floor_difference`` is the raw expression for
every m.
"""
import logging
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tools.errors import DomainError, ParameterError, RangeError
from tools.linear_form import LinearForm
from tools.mangoldt import MangoldtTable
from tools.realspec import Rational, RealSpec
from tools.summation import CompensatedSum, chunk_sum

logger = logging.getLogger(__name__)


class BeattyParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: RealSpec = Field(..., description="Irrational modulus α > 1")
    beta: RealSpec = Field(..., description="Shift β")

    @model_validator(mode="after")
    def _check_alpha(self):
        if self.alpha.is_rational():
            raise DomainError("alpha must be irrational")
        if self.alpha.compare(1) <= 0:
            raise DomainError("alpha must be greater than 1")
        return self

    @property
    def gamma(self) -> RealSpec:
        """γ = α⁻¹."""
        return self.alpha.reciprocal()

    @property
    def delta(self) -> RealSpec:
        """δ = α⁻¹(1 − β)."""
        return self.gamma * (1 - self.beta)

    @property
    def beta_is_integer(self) -> bool:
        return self.beta.is_integer()

    def integer_beta(self) -> int:
        if not self.beta_is_integer:
            raise DomainError("beta must be an integer for the hit-count identity")
        return self.beta.floor()

    # Vectorised exact kernels (None when α, β do not share an exact field).
    def term_form(self) -> Optional[LinearForm]:
        """αn + β."""
        return LinearForm.of(self.alpha, self.beta)

    def membership_form(self, shift: int = 0) -> Optional[LinearForm]:
        """γm + δ − shift·γ, i.e. γ(m − β + 1 − shift). Cached per (params, shift)."""
        return _membership_form(self, shift)

    def __str__(self) -> str:
        return f"alpha={self.alpha} beta={self.beta}"


@lru_cache(maxsize=256)
def _membership_form(params: BeattyParams, shift: int) -> Optional[LinearForm]:
    return LinearForm.of(params.gamma, params.delta - params.gamma * shift)


def make_params(alpha: RealSpec, beta: RealSpec) -> BeattyParams:
    return BeattyParams(alpha=alpha, beta=beta)


# --- terms ---
def beatty_term(params: BeattyParams, n: int) -> int:
    if n < 1:
        raise ParameterError("n must be at least 1")
    return (params.alpha * n + params.beta).floor()


def beatty_terms(params: BeattyParams, n_max: int) -> np.ndarray:
    """⌊αn+β⌋ for n = 1..n_max."""
    n = np.arange(1, n_max + 1, dtype=np.int64)
    form = params.term_form()
    if form is not None:
        return form.floor(n)
    return np.asarray([beatty_term(params, int(k)) for k in n], dtype=np.int64)


# --- membership ---
def _criterion_scalar(params: BeattyParams, m: int):
    gamma = params.gamma
    y = gamma * m + params.delta  # γ(m − β + 1)
    k = y.floor()
    f = y.affine(1, -k)
    return f.sign() > 0 and (f - gamma).sign() <= 0, k


def _member_scalar(params: BeattyParams, m: int) -> bool:
    ok, k = _criterion_scalar(params, m)
    return ok and k >= 1


def is_member(params: BeattyParams, m: int) -> bool:
    """Membership test 0 < {γ(m−β+1)} ≤ γ, restricted to n ≥ 1."""
    if m < 1:
        raise ParameterError("m must be at least 1")
    if params.membership_form() is None:
        return _member_scalar(params, m)
    return bool(member_mask(params, np.array([m], dtype=np.int64))[0])


def _criterion(params: BeattyParams, m: np.ndarray):
    """(0 < {γ(m−β+1)} ≤ γ, ⌊γ(m−β+1)⌋) evaluated exactly, or None without an exact kernel."""
    upper = params.membership_form()
    lower = params.membership_form(shift=1)
    if upper is None or lower is None:
        return None
    # {y} ∈ (0, γ] iff y ∉ ℤ and z ≤ ⌊y⌋, where z = y − γ
    k_up = upper.floor(m)
    k_lo = lower.floor(m)
    z_int = lower.is_integer(m)
    ok = ~upper.is_integer(m) & ((k_lo < k_up) | ((k_lo == k_up) & z_int))
    return ok, k_up


def criterion_mask(params: BeattyParams, m: np.ndarray) -> np.ndarray:
    """The bare criterion 0 < {γ(m−β+1)} ≤ γ, without the n ≥ 1 filter."""
    m = np.asarray(m, dtype=np.int64)
    result = _criterion(params, m)
    if result is None:
        return np.array([_criterion_scalar(params, int(v))[0] for v in m], dtype=bool)
    return result[0]


def member_mask(params: BeattyParams, m: np.ndarray) -> np.ndarray:
    """Vectorised ``is_member`` over an integer array."""
    m = np.asarray(m, dtype=np.int64)
    result = _criterion(params, m)
    if result is None:
        return np.array([_member_scalar(params, int(v)) for v in m], dtype=bool)
    ok, k_up = result
    return ok & (k_up >= 1)


def recover_index(params: BeattyParams, m: int) -> int:
    """The unique n with ⌊αn+β⌋ = m (caller checks membership)."""
    return (params.gamma * m + params.delta).floor()


# --- hit counts ---
def floor_difference(params: BeattyParams, m: np.ndarray) -> np.ndarray:
    """⌊(m−β+1)/α⌋ − ⌊(m−β)/α⌋ for every m.

    This counts n in ((m−β)/α, (m−β+1)/α], so it misses n = (m−β)/α when that is an
    integer. For irrational α this only happens at m = β (n = 0).
    """
    params.integer_beta()
    m = np.asarray(m, dtype=np.int64)
    upper, lower = params.membership_form(), params.membership_form(shift=1)
    if upper is None:
        return np.array([(params.gamma * (int(v) - params.beta + 1)).floor()
                         - (params.gamma * (int(v) - params.beta)).floor() for v in m], dtype=np.int64)
    return upper.floor(m) - lower.floor(m)


def hit_counts(params: BeattyParams, m: np.ndarray) -> np.ndarray:
    """Hits from n ≥ 1 for every m; zero for m ≤ β.

    For β < 0 the first few terms ⌊αn+β⌋ can be ≤ 0. They are counted at their own m
    (β < m ≤ 0), so sums over m ≥ 1 leave them out.
    """
    b = params.integer_beta()
    m = np.asarray(m, dtype=np.int64)
    return np.where(m > b, floor_difference(params, m), 0)


def hit_count(params: BeattyParams, m: int) -> int:
    """Number of n ≥ 1 with ⌊αn+β⌋ = m, via the floor-difference identity (β ∈ ℤ)."""
    if m < 1:
        raise ParameterError("m must be at least 1")
    return int(hit_counts(params, np.array([m], dtype=np.int64))[0])


def _enumerated_hits(params: BeattyParams, lo: int, hi: int) -> np.ndarray:
    """hits[m − lo] = #{n ≥ 1 : ⌊αn+β⌋ = m} for lo ≤ m < hi, by generating the terms."""
    gamma = params.gamma
    n_lo = max(1, (gamma * (lo - params.beta)).floor() - 1)
    n_hi = max(n_lo, (gamma * (hi - params.beta)).floor() + 2)
    n = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    form = params.term_form()
    terms = form.floor(n) if form is not None else np.array([beatty_term(params, int(k)) for k in n], dtype=np.int64)
    terms = terms[(terms >= lo) & (terms < hi)]
    return np.bincount(terms - lo, minlength=hi - lo)


# --- Λ over the sequence ---
def beatty_lambda_sum(table: MangoldtTable, params: BeattyParams, N: int, c: int, d: int,
                      method: Literal["enumeration", "identity"] = "identity") -> float:
    """Σ_{m ≤ N, m ∈ B_{α,β}, m ≡ c (mod d)} Λ(m).

    Both methods weight the same Λ values chunk by chunk and reduce them with
    the same correctly rounded chunk sums, so they agree bit for bit whenever
    the weights agree.
    """
    if d < 1 or not 0 <= c < d:
        raise ParameterError("require 0 ≤ c < d")
    if N > table.limit:
        raise RangeError(f"N={N} exceeds table limit {table.limit}")
    if method == "identity":
        params.integer_beta()
    elif method != "enumeration":
        raise ParameterError(f"unknown method {method!r}")

    def chunk(lo: int, lam: np.ndarray) -> float:
        first = (c - lo) % d
        m = np.arange(lo + first, lo + len(lam), d, dtype=np.int64)
        weights = lam[first::d]
        if method == "identity":
            w = hit_counts(params, m)
        else:
            w = _enumerated_hits(params, lo, lo + len(lam))[first::d]
        return chunk_sum(weights[w.astype(bool)] * w[w.astype(bool)])

    acc = CompensatedSum()
    for partial in table.map_chunks(chunk, 1, N + 1):
        acc.add(partial)
    return acc.value


def complementary_params(params: BeattyParams) -> BeattyParams:
    """α/(α−1) for β = 0: B_α and B_{α/(α−1)} partition the positive integers."""
    if params.beta.compare(0) != 0:
        raise DomainError("complementary sequence is defined here for beta = 0")
    alpha = params.alpha
    return BeattyParams(alpha=alpha * (alpha - 1).reciprocal(), beta=Rational(p=0))
