"""Trigonometric approximations: the sawtooth ψ, Vaaler's polynomial ψ* with its
Fejér envelope, and the smoothed interval indicator Ψ_Δ.

e(x) = exp(2πix) throughout.
"""
import logging
import math
from fractions import Fraction
from typing import Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tools.errors import ParameterError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Grid evaluation is chunked so the (points × degree) phase matrix stays small.
_EVAL_CELLS = 1 << 22


def sawtooth(x):
    """ψ(x) = x − ⌊x⌋ − 1/2, in [−1/2, 1/2). Exact for int and Fraction input."""
    if isinstance(x, (int, Fraction)):
        return x - math.floor(x) - Fraction(1, 2)
    if isinstance(x, np.ndarray):
        return x - np.floor(x) - 0.5
    return x - math.floor(x) - 0.5


class TrigPoly(BaseModel):
    """Real trigonometric polynomial c_0 + Σ_{1≤|h|≤H} c_h e(hx) with c_{−h} = conj(c_h).

    Only the positive frequencies are stored.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    degree: int = Field(..., description="H: largest frequency")
    constant: float = Field(0.0, description="c_0")
    coefficients: np.ndarray = Field(..., description="c_h for h = 1..H, complex")
    bound_constant: float = Field(..., description="C with |c_h| ≤ C/h")

    @model_validator(mode="after")
    def _shape(self):
        if self.degree < 1:
            raise ParameterError("degree must be at least 1")
        if self.coefficients.shape != (self.degree,):
            raise ParameterError("one coefficient per positive frequency is required")
        self.coefficients.setflags(write=False)
        return self

    def coefficient(self, h: int) -> complex:
        if h == 0:
            return complex(self.constant)
        if abs(h) > self.degree:
            return 0j
        c = complex(self.coefficients[abs(h) - 1])
        return c if h > 0 else c.conjugate()

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        scalar = np.isscalar(x)
        xs = np.mod(np.atleast_1d(np.asarray(x, dtype=np.float64)), 1.0)
        h = np.arange(1, self.degree + 1, dtype=np.float64)
        out = np.empty(len(xs), dtype=np.float64)
        step = max(1, _EVAL_CELLS // self.degree)
        for lo in range(0, len(xs), step):
            phases = np.exp(2j * np.pi * np.outer(xs[lo:lo + step], h))
            out[lo:lo + step] = self.constant + 2.0 * np.real(phases @ self.coefficients)
        return float(out[0]) if scalar else out

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.evaluate(x)

    def decay_ratio(self) -> float:
        """max_h h·|c_h|, to be compared with ``bound_constant``."""
        h = np.arange(1, self.degree + 1)
        return float(np.max(h * np.abs(self.coefficients)))


# --- Vaaler ---
def _vaaler_weight(t: np.ndarray) -> np.ndarray:
    """φ(t) = πt(1−t)cot(πt) + t on (0, 1)."""
    return np.pi * t * (1.0 - t) / np.tan(np.pi * t) + t


def vaaler_poly(H: int) -> TrigPoly:
    """ψ*(x) = Σ_{h≤H} −φ(h/(H+1)) sin(2πhx)/(πh), i.e. R(h) = −φ(h/(H+1))/(2πih)."""
    if H < 1:
        raise ParameterError("H must be at least 1")
    h = np.arange(1, H + 1, dtype=np.float64)
    coeffs = -_vaaler_weight(h / (H + 1)) / (2j * np.pi * h)
    return TrigPoly(degree=H, constant=0.0, coefficients=coeffs.astype(np.complex128),
                    bound_constant=1.0 / (2.0 * np.pi))


def fejer_envelope(x: ArrayLike, H: int, weights: Literal["proof", "stated"] = "proof") -> ArrayLike:
    """(1/(2H+2)) Σ_{|h|≤H} (1 − |h|/L) e(hx), with L = H+1 ("proof") or L = H ("stated")."""
    if H < 1:
        raise ParameterError("H must be at least 1")
    L = H + 1 if weights == "proof" else H
    scalar = np.isscalar(x)
    xs = np.mod(np.atleast_1d(np.asarray(x, dtype=np.float64)), 1.0)
    h = np.arange(1, H + 1, dtype=np.float64)
    w = 1.0 - h / L
    out = np.empty(len(xs), dtype=np.float64)
    step = max(1, _EVAL_CELLS // H)
    for lo in range(0, len(xs), step):
        out[lo:lo + step] = 1.0 + 2.0 * (np.cos(2.0 * np.pi * np.outer(xs[lo:lo + step], h)) @ w)
    out /= 2.0 * H + 2.0
    return float(out[0]) if scalar else out


def vaaler_sandwich(x: ArrayLike, H: int, poly: TrigPoly = None) -> Tuple[ArrayLike, ArrayLike]:
    """Lower and upper bounds ψ*(x) ∓ envelope(x) that enclose ψ(x)."""
    poly = poly or vaaler_poly(H)
    centre = poly.evaluate(x)
    env = fejer_envelope(x, H)
    return centre - env, centre + env


def sandwich_violation(H: int, x: np.ndarray, weights: Literal["proof", "stated"] = "proof") -> float:
    """max(|ψ*(x) − ψ(x)| − envelope(x)) over the grid; ≤ 0 means the sandwich holds."""
    x = np.asarray(x, dtype=np.float64)
    gap = np.abs(vaaler_poly(H).evaluate(x) - sawtooth(x)) - fejer_envelope(x, H, weights)
    return float(np.max(gap))


# --- Smoothed indicator ---
class SmoothedIndicator(BaseModel):
    """Ψ_Δ: the indicator of (0, γ] (mod 1) with linear ramps of half-width Δ at 0 and γ.

    Ψ_Δ(x) = γ + Σ_{j≥1} g_j e(jx) + h_j e(−jx) with
    g_j = (1 − e(−jγ))/(2πij) · sin(2πjΔ)/(2πjΔ) and h_j = conj(g_j), so
    max(|g_j|, |h_j|) ≤ min(1/j, 1/(j²Δ)).
    """
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., description="Interval length γ ∈ (0, 1)")
    delta: float = Field(..., description="Ramp half-width Δ")
    J: int = Field(..., description="Truncation degree of the Fourier series")
    bound_constant: float = Field(1.0, description="C in max(|g_j|,|h_j|) ≤ C·min(1/j, 1/(j²Δ))")

    @model_validator(mode="after")
    def _check(self):
        if not 0.0 < self.gamma < 1.0:
            raise ParameterError("gamma must lie in (0, 1)")
        if not 0.0 < self.delta < 0.125:
            raise ParameterError("delta must lie in (0, 1/8)")
        if self.delta > min(self.gamma, 1.0 - self.gamma) / 2.0:
            raise ParameterError("delta must not exceed min(gamma, 1 - gamma)/2")
        if self.J < 1:
            raise ParameterError("J must be at least 1")
        return self

    def g(self, j: np.ndarray) -> np.ndarray:
        j = np.asarray(j, dtype=np.float64)
        jump = (1.0 - np.exp(-2j * np.pi * j * self.gamma)) / (2j * np.pi * j)
        return jump * np.sinc(2.0 * j * self.delta)

    def h(self, j: np.ndarray) -> np.ndarray:
        return np.conj(self.g(j))

    def poly(self) -> TrigPoly:
        """Truncation of the Fourier series at degree J."""
        j = np.arange(1, self.J + 1)
        return TrigPoly(degree=self.J, constant=self.gamma, coefficients=self.g(j).astype(np.complex128),
                        bound_constant=self.bound_constant)

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        """Exact trapezoid value."""
        scalar = np.isscalar(x)
        t = np.mod(np.atleast_1d(np.asarray(x, dtype=np.float64)), 1.0)
        d, g = self.delta, self.gamma
        out = np.clip(np.minimum((t + d) / (2 * d), (g + d - t) / (2 * d)), 0.0, 1.0)
        out = np.where(t >= 1.0 - d, (t - 1.0 + d) / (2 * d), out)
        # outside the ramps the ramp formulas can round away from 0 or 1
        out = np.where(self.in_transition(t), out, self.sharp(t))
        return float(out[0]) if scalar else out

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.evaluate(x)

    def sharp(self, x: ArrayLike) -> ArrayLike:
        """The indicator Ψ of (0, γ] mod 1."""
        t = np.mod(np.asarray(x, dtype=np.float64), 1.0)
        return ((t > 0.0) & (t <= self.gamma)).astype(np.float64)

    def in_transition(self, x: ArrayLike) -> ArrayLike:
        """True where Ψ_Δ may differ from Ψ: [0,Δ) ∪ (γ−Δ, γ+Δ) ∪ (1−Δ, 1)."""
        t = np.mod(np.asarray(x, dtype=np.float64), 1.0)
        d, g = self.delta, self.gamma
        return (t < d) | ((t > g - d) & (t < g + d)) | (t > 1.0 - d)

    def coefficient_bound(self, j: np.ndarray) -> np.ndarray:
        j = np.asarray(j, dtype=np.float64)
        return self.bound_constant * np.minimum(1.0 / j, 1.0 / (j * j * self.delta))

    def truncation_bound(self, J: int = None) -> float:
        """Σ_{j>J} 2C·min(1/j, 1/(j²Δ)), the sup-norm change from truncating at J."""
        J = J or self.J
        knee = math.ceil(1.0 / self.delta)
        total = 0.0
        if J < knee:
            total += float(np.sum(1.0 / np.arange(J + 1, knee + 1)))
            J = knee
        total += 1.0 / (J * self.delta)
        return 2.0 * self.bound_constant * total

    def fourier_tail(self, J: int = None) -> float:
        """Σ_{j>J} (|g_j| + |h_j|) ≤ 1/(π²JΔ)."""
        J = J or self.J
        return 1.0 / (np.pi ** 2 * J * self.delta)


def default_degree(delta: float) -> int:
    return math.ceil(10.0 / delta)


def smoothed_indicator(gamma: float, delta: float, J: int = None) -> SmoothedIndicator:
    J = J if J is not None else default_degree(delta)
    return SmoothedIndicator(gamma=float(gamma), delta=float(delta), J=J)
