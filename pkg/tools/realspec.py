"""Exact representations of the real numbers α, β (and derived γ, δ, θ).

Three variants share one interface:

- ``Rational``             p/q, exact.
- ``QuadraticIrrational``  (p + r√D)/q, exact; comparisons reduce to integer
                           inequalities.
- ``DecimalLiteral``       a digit string read as an enclosure of radius
                           max(10^-digits, 2^-bits); any answer the enclosure
                           cannot certify raises ``PrecisionExhaustedError``.

Arithmetic is closed inside each exact family (rationals, one quadratic field).
Mixing fields or touching a decimal falls back to certified decimal enclosures.
"""
import math
import re
from fractions import Fraction
from typing import Literal, Tuple, Union

import mpmath
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.settings import settings
from tools.errors import DomainError, ParameterError, PrecisionExhaustedError

Number = Union[int, Fraction]


def _as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def _square_free_split(D: int) -> Tuple[int, int]:
    """Return (s, D') with D = s²·D' and D' square-free."""
    s, core, rest = 1, 1, D
    k = 2
    # once k³ > rest, rest has at most two prime factors, all ≥ k
    while k * k * k <= rest:
        e = 0
        while rest % k == 0:
            rest //= k
            e += 1
        s *= k ** (e // 2)
        core *= k ** (e % 2)
        k += 1
    root = math.isqrt(rest)
    if root > 1 and root * root == rest:
        return s * root, core
    return s, core * rest


def _floor_mul_sqrt(r: int, D: int) -> int:
    """floor(r·√D) for non-square D."""
    if r == 0:
        return 0
    root = math.isqrt(r * r * D)
    return root if r > 0 else -root - 1


class RealSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str

    # --- interface -------------------------------------------------------
    def is_rational(self) -> bool:
        return False

    def is_integer(self) -> bool:
        return False

    def floor(self) -> int:
        raise NotImplementedError

    def compare(self, other: Number) -> int:
        """Sign of (self − other), exact or certified."""
        raise NotImplementedError

    def affine(self, a: Number, b: Number) -> "RealSpec":
        """Return a·self + b for rational a, b."""
        raise NotImplementedError

    def reciprocal(self) -> "RealSpec":
        raise NotImplementedError

    def enclosure(self, bits: int) -> Tuple[Fraction, Fraction]:
        """Rational lo ≤ self ≤ hi, width at most 2^-bits for exact variants."""
        raise NotImplementedError

    # --- shared behaviour -----------------------------------------------
    def sign(self) -> int:
        return self.compare(0)

    def ceil(self) -> int:
        return -self.affine(-1, 0).floor()

    def frac(self) -> "RealSpec":
        return self.affine(1, -self.floor())

    def nearest_integer(self) -> int:
        n = self.floor()
        return n + 1 if self.compare(Fraction(2 * n + 1, 2)) > 0 else n

    def to_fraction(self, bits: int) -> Fraction:
        """floor(self·2^bits)/2^bits."""
        scale = 1 << bits
        return Fraction(self.affine(scale, 0).floor(), scale)

    def to_mpf(self, bits: int = 0) -> mpmath.mpf:
        bits = bits or settings.DECIMAL_PRECISION_BITS
        lo, hi = self.enclosure(bits + 8)
        with mpmath.workprec(bits + 16):
            return (mpmath.mpf(lo.numerator) / lo.denominator + mpmath.mpf(hi.numerator) / hi.denominator) / 2

    def __float__(self) -> float:
        return float(self.to_mpf(80))

    def __neg__(self) -> "RealSpec":
        return self.affine(-1, 0)

    def __add__(self, other) -> "RealSpec":
        if isinstance(other, (int, Fraction)):
            return self.affine(1, other)
        return _add(self, other)

    __radd__ = __add__

    def __sub__(self, other) -> "RealSpec":
        if isinstance(other, (int, Fraction)):
            return self.affine(1, -_as_fraction(other))
        return _add(self, -other)

    def __rsub__(self, other) -> "RealSpec":
        return self.affine(-1, other)

    def __mul__(self, other) -> "RealSpec":
        if isinstance(other, (int, Fraction)):
            return self.affine(other, 0)
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RealSpec":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a RealSpec by zero")
            return self.affine(1 / _as_fraction(other), 0)
        return _mul(self, other.reciprocal())


class Rational(RealSpec):
    kind: Literal["rat"] = "rat"
    p: int = Field(..., description="Numerator")
    q: int = Field(1, description="Positive denominator")

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if isinstance(data, dict) and "p" in data:
            p, q = int(data["p"]), int(data.get("q", 1))
            if q == 0:
                raise ValueError("denominator must be nonzero")
            f = Fraction(p, q)
            data = {**data, "p": f.numerator, "q": f.denominator}
        return data

    @classmethod
    def of(cls, x: Number) -> "Rational":
        f = _as_fraction(x)
        return cls(p=f.numerator, q=f.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def is_rational(self) -> bool:
        return True

    def is_integer(self) -> bool:
        return self.q == 1

    def floor(self) -> int:
        return self.p // self.q

    def compare(self, other: Number) -> int:
        diff = self.value - _as_fraction(other)
        return (diff > 0) - (diff < 0)

    def affine(self, a: Number, b: Number) -> "RealSpec":
        return Rational.of(_as_fraction(a) * self.value + _as_fraction(b))

    def reciprocal(self) -> "RealSpec":
        if self.p == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return Rational.of(1 / self.value)

    def enclosure(self, bits: int) -> Tuple[Fraction, Fraction]:
        return self.value, self.value

    def __str__(self) -> str:
        return f"rat:{self.p}/{self.q}"


class QuadraticIrrational(RealSpec):
    kind: Literal["quad"] = "quad"
    p: int = Field(..., description="Rational part numerator")
    r: int = Field(..., description="Coefficient of √D")
    D: int = Field(..., description="Positive non-square radicand")
    q: int = Field(1, description="Positive common denominator")

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data):
        if not isinstance(data, dict) or "D" not in data:
            return data
        p, r, D, q = int(data["p"]), int(data["r"]), int(data["D"]), int(data.get("q", 1))
        if q == 0:
            raise ValueError("denominator must be nonzero")
        if D <= 0:
            raise ValueError("radicand D must be positive")
        if r == 0:
            raise ValueError("r must be nonzero; use Rational")
        s, D = _square_free_split(D)
        r *= s
        if math.isqrt(D) ** 2 == D:
            raise ValueError(f"radicand {D} is a perfect square")
        if q < 0:
            p, r, q = -p, -r, -q
        g = math.gcd(math.gcd(p, r), q)
        return {**data, "p": p // g, "r": r // g, "D": D, "q": q // g}

    @classmethod
    def make(cls, p: int, r: int, D: int, q: int = 1) -> RealSpec:
        """Build (p + r√D)/q, collapsing to ``Rational`` when r√D is rational."""
        if r == 0:
            return Rational(p=p, q=q)
        s, D0 = _square_free_split(D)
        if D0 == 1 or math.isqrt(D) ** 2 == D:
            return Rational(p=p + r * math.isqrt(D), q=q)
        return cls(p=p, r=r, D=D, q=q)

    def floor(self) -> int:
        return (self.p + _floor_mul_sqrt(self.r, self.D)) // self.q

    def compare(self, other: Number) -> int:
        f = _as_fraction(other)
        # sign((p + r√D)/q − a/b) = sign(u√D − v), u = b·r, v = a·q − b·p
        u = f.denominator * self.r
        v = f.numerator * self.q - f.denominator * self.p
        if u > 0 and v <= 0:
            return 1
        if u < 0 and v >= 0:
            return -1
        lhs, rhs = u * u * self.D, v * v
        if u > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def affine(self, a: Number, b: Number) -> RealSpec:
        a, b = _as_fraction(a), _as_fraction(b)
        if a == 0:
            return Rational.of(b)
        an, ad, bn, bd = a.numerator, a.denominator, b.numerator, b.denominator
        return QuadraticIrrational.make(
            p=an * self.p * bd + bn * ad * self.q,
            r=an * self.r * bd,
            D=self.D,
            q=ad * self.q * bd,
        )

    def reciprocal(self) -> RealSpec:
        # q/(p + r√D) = q(p − r√D)/(p² − r²D)
        norm = self.p * self.p - self.r * self.r * self.D
        return QuadraticIrrational.make(p=self.q * self.p, r=-self.q * self.r, D=self.D, q=norm)

    def enclosure(self, bits: int) -> Tuple[Fraction, Fraction]:
        lo = self.to_fraction(bits)
        return lo, lo + Fraction(1, 1 << bits)

    def conjugate(self) -> RealSpec:
        return QuadraticIrrational.make(p=self.p, r=-self.r, D=self.D, q=self.q)

    def __str__(self) -> str:
        return f"quad:{self.p},{self.r},{self.D},{self.q}"


_DIGITS = re.compile(r"^[+-]?(\d+)(?:\.(\d*))?$")


class DecimalLiteral(RealSpec):
    kind: Literal["dec"] = "dec"
    digits: str = Field(..., description="Decimal digit string, e.g. '1.41421356'")
    bits: int = Field(default_factory=lambda: settings.DECIMAL_PRECISION_BITS, description="Working precision in bits")

    @model_validator(mode="after")
    def _check_digits(self):
        if not _DIGITS.match(self.digits):
            raise ValueError(f"malformed decimal literal {self.digits!r}")
        if self.bits < 8:
            raise ValueError("precision must be at least 8 bits")
        return self

    @property
    def center(self) -> Fraction:
        return Fraction(self.digits)

    @property
    def radius(self) -> Fraction:
        frac_digits = len(_DIGITS.match(self.digits).group(2) or "")
        return max(Fraction(1, 10 ** frac_digits), Fraction(1, 1 << self.bits))

    def enclosure(self, bits: int = 0) -> Tuple[Fraction, Fraction]:
        return self.center - self.radius, self.center + self.radius

    def floor(self) -> int:
        lo, hi = self.enclosure()
        a, b = math.floor(lo), math.floor(hi)
        if a != b:
            raise PrecisionExhaustedError(f"cannot certify floor of dec:{self.digits[:24]}... at {self.bits} bits")
        return a

    def compare(self, other: Number) -> int:
        lo, hi = self.enclosure()
        f = _as_fraction(other)
        if lo > f:
            return 1
        if hi < f:
            return -1
        raise PrecisionExhaustedError(f"cannot certify comparison of dec:{self.digits[:24]}... with {f}")

    def affine(self, a: Number, b: Number) -> RealSpec:
        a, b = _as_fraction(a), _as_fraction(b)
        lo, hi = self.enclosure()
        lo, hi = sorted((a * lo + b, a * hi + b))
        return decimal_from_interval(lo, hi, self.bits)

    def reciprocal(self) -> RealSpec:
        lo, hi = self.enclosure()
        if lo <= 0 <= hi:
            raise PrecisionExhaustedError("cannot certify a nonzero divisor")
        return decimal_from_interval(*sorted((1 / hi, 1 / lo)), bits=self.bits)

    def __str__(self) -> str:
        return f"dec:{self.digits}"


def decimal_from_interval(lo: Fraction, hi: Fraction, bits: int) -> DecimalLiteral:
    """Smallest-digit decimal whose enclosure contains [lo, hi]."""
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    k = 0
    # 10^-k must cover the interval half-width plus rounding of the midpoint.
    while Fraction(1, 10 ** (k + 1)) >= 2 * half and Fraction(1, 10 ** (k + 1)) > Fraction(1, 1 << bits):
        k += 1
        if k > bits:
            break
    scaled = mid * 10 ** k
    n = math.floor(scaled + Fraction(1, 2))
    sign = "-" if n < 0 else ""
    n = abs(n)
    if k:
        whole, part = divmod(n, 10 ** k)
        text = f"{sign}{whole}.{part:0{k}d}"
    else:
        text = f"{sign}{n}"
    return DecimalLiteral(digits=text, bits=bits)


def _interval_of(x: RealSpec, bits: int) -> Tuple[Fraction, Fraction]:
    return x.enclosure(bits)


def _add(x: RealSpec, y: RealSpec) -> RealSpec:
    if isinstance(x, Rational):
        return y.affine(1, x.value)
    if isinstance(y, Rational):
        return x.affine(1, y.value)
    if isinstance(x, QuadraticIrrational) and isinstance(y, QuadraticIrrational) and x.D == y.D:
        return QuadraticIrrational.make(
            p=x.p * y.q + y.p * x.q, r=x.r * y.q + y.r * x.q, D=x.D, q=x.q * y.q
        )
    bits = _working_bits(x, y)
    (a, b), (c, d) = _interval_of(x, bits), _interval_of(y, bits)
    return decimal_from_interval(a + c, b + d, bits)


def _mul(x: RealSpec, y: RealSpec) -> RealSpec:
    if isinstance(x, Rational):
        return y.affine(x.value, 0)
    if isinstance(y, Rational):
        return x.affine(y.value, 0)
    if isinstance(x, QuadraticIrrational) and isinstance(y, QuadraticIrrational) and x.D == y.D:
        return QuadraticIrrational.make(
            p=x.p * y.p + x.r * y.r * x.D, r=x.p * y.r + y.p * x.r, D=x.D, q=x.q * y.q
        )
    bits = _working_bits(x, y)
    (a, b), (c, d) = _interval_of(x, bits), _interval_of(y, bits)
    products = (a * c, a * d, b * c, b * d)
    return decimal_from_interval(min(products), max(products), bits)


def _working_bits(*xs: RealSpec) -> int:
    bits = [x.bits for x in xs if isinstance(x, DecimalLiteral)]
    return min(bits) if bits else settings.DECIMAL_PRECISION_BITS


# --- textual syntax ---------------------------------------------------------

def parse_real_spec(text: str, bits: int = 0) -> RealSpec:
    """Parse ``rat:p/q``, ``quad:p,r,D,q``, ``sqrt:D``, ``dec:<digits>``,
    or a bare integer / decimal (read as an exact rational)."""
    text = text.strip()
    bits = bits or settings.DECIMAL_PRECISION_BITS
    try:
        if text.startswith("rat:"):
            body = text[4:]
            p, _, q = body.partition("/")
            return Rational(p=int(p), q=int(q or 1))
        if text.startswith("quad:"):
            parts = [int(v) for v in text[5:].split(",")]
            if len(parts) == 3:
                parts.append(1)
            p, r, D, q = parts
            return QuadraticIrrational.make(p, r, D, q)
        if text.startswith("sqrt:"):
            return QuadraticIrrational.make(0, 1, int(text[5:]), 1)
        if text.startswith("dec:"):
            return DecimalLiteral(digits=text[4:], bits=bits)
        if _DIGITS.match(text):
            return Rational.of(Fraction(text))
    except (ValueError, TypeError) as e:
        raise ParameterError(f"invalid real number {text!r}: {e}") from e
    raise ParameterError(f"invalid real number {text!r}")


def require_irrational(x: RealSpec, name: str = "alpha") -> None:
    if x.is_rational():
        raise DomainError(f"{name} must be irrational")


GOLDEN_RATIO = QuadraticIrrational(p=1, r=1, D=5, q=2)
SQRT2 = QuadraticIrrational(p=0, r=1, D=2, q=1)
