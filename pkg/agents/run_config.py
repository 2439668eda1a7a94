"""Resolved command-line configuration: parse, validate, then execute."""
import math
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from config.settings import settings
from tools.beatty import BeattyParams
from tools.errors import DomainError, ParameterError
from tools.realspec import RealSpec, parse_real_spec, require_irrational

SUBCOMMANDS = (
    "sieve-stats", "beatty", "member", "expsum", "discrepancy", "vaaler-check", "psi-delta-check",
    "dirichlet", "type", "verify-th1", "verify-th2", "lemma24-scan", "decay-scan",
    "decomposition-check", "pipeline-check", "sd", "bound-comparison",
)

# Options each subcommand cannot run without.
REQUIRED = {
    "sieve-stats": ("N",),
    "beatty": ("alpha", "N"),
    "member": ("alpha", "m"),
    "expsum": ("N", "theta"),
    "discrepancy": ("alpha", "N"),
    "vaaler-check": ("H",),
    "psi-delta-check": ("gamma", "delta"),
    "dirichlet": ("alpha", "K"),
    "type": ("alpha",),
    "verify-th1": ("alpha", "grid"),
    "verify-th2": ("alpha", "grid"),
    "lemma24-scan": ("alpha", "N", "k_max"),
    "decay-scan": ("alpha", "grid"),
    "decomposition-check": ("alpha", "N"),
    "pipeline-check": ("alpha", "N", "delta"),
    "sd": ("alpha", "N"),
    "bound-comparison": ("alpha", "grid"),
}

# Subcommands that work on a Beatty sequence (α irrational, α > 1).
BEATTY_COMMANDS = (
    "beatty", "member", "verify-th1", "verify-th2", "lemma24-scan", "decay-scan",
    "decomposition-check", "pipeline-check", "sd",
)


def parse_grid(spec: str) -> List[int]:
    """``start:stop:ratio`` → geometric integer grid start, start·ratio, … ≤ stop."""
    try:
        parts = spec.split(":")
        if len(parts) == 1:
            return [int(parts[0])]
        start, stop = int(parts[0]), int(parts[1])
        ratio = float(parts[2]) if len(parts) > 2 else float(settings.GRID_RATIO)
    except ValueError as e:
        raise ParameterError(f"invalid grid {spec!r}: {e}") from e
    if start < 1 or stop < start:
        raise ParameterError(f"grid {spec!r} needs 1 ≤ start ≤ stop")
    if ratio <= 1:
        raise ParameterError(f"grid ratio must exceed 1, got {ratio}")
    grid, value = [], float(start)
    while round(value) <= stop:
        point = int(round(value))
        if not grid or point != grid[-1]:
            grid.append(point)
        value *= ratio
    return grid


class RunConfig(BaseModel):
    subcommand: Literal[SUBCOMMANDS]
    alpha: Optional[str] = Field(None, description="RealSpec text for α")
    beta: str = Field("0", description="RealSpec text for β")
    c: int = 0
    d: int = 1
    N: Optional[int] = Field(None, description="Bound N (also x or M, depending on the subcommand)")
    grid: Optional[str] = Field(None, description="start:stop:ratio")
    m: Optional[int] = None
    theta: Optional[str] = Field(None, description="RealSpec text for θ")
    gamma: Optional[str] = Field(None, description="RealSpec text for γ (psi-delta-check)")
    w: int = 1
    K: Optional[int] = None
    k_max: Optional[int] = None
    depth: int = Field(default_factory=lambda: settings.TYPE_ESTIMATE_DEPTH)
    epsilon: float = Field(default_factory=lambda: settings.EPSILON)
    delta: Optional[float] = Field(None, description="Ramp half-width Δ")
    H: Optional[int] = None
    J: Optional[int] = None
    fourier_J: Optional[int] = None
    method: Literal["enumeration", "identity"] = "identity"
    bits: int = Field(default_factory=lambda: settings.DECIMAL_PRECISION_BITS)
    out: Optional[str] = None
    format: Literal["json", "csv"] = "json"
    threads: int = Field(default_factory=lambda: settings.THREADS)
    seed: int = Field(default_factory=lambda: settings.SEED)

    @field_validator("threads")
    @classmethod
    def _threads(cls, v: int) -> int:
        if v < 1:
            raise ValueError("threads must be at least 1")
        return v

    @field_validator("bits")
    @classmethod
    def _bits(cls, v: int) -> int:
        if not 8 <= v <= settings.MAX_PRECISION_BITS:
            raise ValueError(f"bits must lie in [8, {settings.MAX_PRECISION_BITS}]")
        return v

    @model_validator(mode="after")
    def _combination(self):
        missing = [name for name in REQUIRED[self.subcommand] if getattr(self, name) is None]
        if missing:
            raise ParameterError(f"{self.subcommand} requires --{', --'.join(m.replace('_', '-') for m in missing)}")
        if self.d < 1 or not 0 <= self.c < self.d:
            raise ParameterError("require 0 ≤ c < d")
        if self.subcommand == "verify-th1" and math.gcd(self.c, self.d) != 1:
            raise ParameterError("verify-th1 requires gcd(c, d) = 1")
        if self.N is not None and self.N < 1:
            raise ParameterError("N must be at least 1")
        if self.grid is not None:
            parse_grid(self.grid)
        # resolve the real parameters now so bad input fails before any work
        if self.alpha is not None:
            self.real("alpha")
            self.real("beta")
        if self.subcommand in BEATTY_COMMANDS:
            self.params()
        if self.subcommand == "bound-comparison":
            require_irrational(self.real("alpha"))
        return self

    def real(self, name: str) -> RealSpec:
        return parse_real_spec(getattr(self, name), self.bits)

    def params(self) -> BeattyParams:
        try:
            return BeattyParams(alpha=self.real("alpha"), beta=self.real("beta"))
        except ValidationError as e:
            raise DomainError(e.errors()[0]["msg"].removeprefix("Value error, ")) from None

    def grid_points(self) -> List[int]:
        return parse_grid(self.grid)

    def table_limit(self) -> int:
        """Largest n for which the subcommand needs Λ(n)."""
        if self.subcommand in ("verify-th1", "decomposition-check", "sieve-stats", "expsum", "lemma24-scan", "sd",
                               "bound-comparison"):
            top = max(self.grid_points()) if self.grid else self.N
            return top
        if self.subcommand == "pipeline-check":
            return self.d * self.N + self.c
        if self.subcommand == "verify-th2":
            params = self.params()
            M = (params.alpha * max(self.grid_points()) + params.beta).floor()
            return max(2, self.d * M + self.c)
        return 0
