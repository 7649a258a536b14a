"""Asymptotic regime of the node density exponent alpha."""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from ..utils.exceptions import ValidationError

# Irrational values this close to a small-denominator fraction are rejected
NEAR_RATIONAL_TOLERANCE = 1e-9
NEAR_RATIONAL_MAX_DENOMINATOR = 64

ExponentKey = tuple[int, ...]


class RegimeKind(Enum):
    """Which exponent scale governs the expansion."""

    ZERO = "zero"
    IRRATIONAL = "irrational"
    RATIONAL = "rational"
    ONE = "one"


@dataclass(frozen=True)
class AlphaRegime:
    """
    Regime of the node density exponent.

    Exponents of the two-parameter scale eps^(k - p*alpha) are represented by
    integer keys so that they can be added and compared exactly:

    - ZERO and ONE: ``(k - p,)`` for ONE, ``(k,)`` for ZERO (integer exponents)
    - RATIONAL m0/n0: ``(k*n0 - p*m0,)``, the exponent being that over n0
    - IRRATIONAL: ``(k, p)``

    Attributes:
        kind: Regime kind
        value: Alpha for the irrational regime
        m0: Numerator for the rational regime
        n0: Denominator for the rational regime
    """

    kind: RegimeKind
    value: float | None = None
    m0: int | None = None
    n0: int | None = None

    def __post_init__(self):
        if self.kind == RegimeKind.RATIONAL:
            if self.m0 is None or self.n0 is None:
                raise ValidationError("Rational regime needs m0 and n0", field="alpha")
            if not (0 < self.m0 < self.n0):
                raise ValidationError(
                    f"Rational alpha must satisfy 0 < m0 < n0, got {self.m0}/{self.n0}",
                    field="alpha",
                    value=f"{self.m0}/{self.n0}",
                )
            if math.gcd(self.m0, self.n0) != 1:
                raise ValidationError(
                    f"m0={self.m0} and n0={self.n0} are not coprime",
                    field="alpha",
                    value=f"{self.m0}/{self.n0}",
                )
        elif self.kind == RegimeKind.IRRATIONAL:
            if self.value is None or not (0.0 < self.value < 1.0):
                raise ValidationError(
                    f"Irrational alpha must lie strictly inside (0, 1), got {self.value}",
                    field="alpha",
                    value=self.value,
                )
            nearest = Fraction(self.value).limit_denominator(NEAR_RATIONAL_MAX_DENOMINATOR)
            if abs(self.value - float(nearest)) < NEAR_RATIONAL_TOLERANCE:
                raise ValidationError(
                    f"alpha={self.value!r} is within {NEAR_RATIONAL_TOLERANCE} of "
                    f"{nearest}; use the rational regime",
                    field="alpha",
                    value=self.value,
                )

    @classmethod
    def zero(cls) -> "AlphaRegime":
        return cls(RegimeKind.ZERO)

    @classmethod
    def one(cls) -> "AlphaRegime":
        return cls(RegimeKind.ONE)

    @classmethod
    def irrational(cls, alpha: float) -> "AlphaRegime":
        return cls(RegimeKind.IRRATIONAL, value=float(alpha))

    @classmethod
    def rational(cls, m0: int, n0: int) -> "AlphaRegime":
        return cls(RegimeKind.RATIONAL, m0=int(m0), n0=int(n0))

    @classmethod
    def parse(cls, regime: str, alpha: str | None = None) -> "AlphaRegime":
        """
        Build a regime from command-line text.

        Args:
            regime: "zero", "frac" (or "fractional") or "one"
            alpha: For "frac": "p/q" gives a rational regime, a decimal an
                irrational one

        Raises:
            ValidationError: If the text cannot be interpreted
        """
        regime = regime.strip().lower()
        if regime == "zero":
            return cls.zero()
        if regime == "one":
            return cls.one()
        if regime not in ("frac", "fractional"):
            raise ValidationError(f"Unknown regime '{regime}'", field="regime", value=regime)
        if not alpha:
            raise ValidationError("--alpha is required for the fractional regime", field="alpha")

        text = alpha.strip()
        try:
            if "/" in text:
                numerator, denominator = text.split("/", 1)
                return cls.rational(int(numerator), int(denominator))
            return cls.irrational(float(text))
        except ValueError as e:
            raise ValidationError(f"Cannot parse alpha '{alpha}'", field="alpha", value=alpha) from e

    @property
    def alpha(self) -> float:
        """Numerical value of alpha."""
        if self.kind == RegimeKind.ZERO:
            return 0.0
        if self.kind == RegimeKind.ONE:
            return 1.0
        if self.kind == RegimeKind.RATIONAL:
            return self.m0 / self.n0
        return float(self.value)

    @property
    def is_fractional(self) -> bool:
        return self.kind in (RegimeKind.IRRATIONAL, RegimeKind.RATIONAL)

    @property
    def has_vertex_mass(self) -> bool:
        """Whether the limit problem carries the mass term at the vertex."""
        return self.kind == RegimeKind.ONE

    # Exponent key algebra

    def key(self, k: int, p: int = 0) -> ExponentKey:
        """Key of the exponent k - p*alpha."""
        if self.kind == RegimeKind.ZERO:
            return (k,)
        if self.kind == RegimeKind.ONE:
            return (k - p,)
        if self.kind == RegimeKind.RATIONAL:
            return (k * self.n0 - p * self.m0,)
        return (k, p)

    @property
    def zero_key(self) -> ExponentKey:
        return self.key(0, 0)

    @staticmethod
    def add(a: ExponentKey, b: ExponentKey) -> ExponentKey:
        return tuple(x + y for x, y in zip(a, b, strict=True))

    @staticmethod
    def sub(a: ExponentKey, b: ExponentKey) -> ExponentKey:
        return tuple(x - y for x, y in zip(a, b, strict=True))

    def exponent(self, key: ExponentKey) -> float:
        """Numerical exponent of a key."""
        if self.kind == RegimeKind.RATIONAL:
            return key[0] / self.n0
        if self.kind == RegimeKind.IRRATIONAL:
            return key[0] - key[1] * self.value
        return float(key[0])

    def is_negative(self, key: ExponentKey) -> bool:
        """Whether a key denotes a negative exponent."""
        if self.kind == RegimeKind.IRRATIONAL:
            # k - p*alpha with irrational alpha vanishes only for k = p = 0
            return key != (0, 0) and self.exponent(key) < 0.0
        return key[0] < 0

    def is_below(self, key: ExponentKey, bound: ExponentKey) -> bool:
        """Strict comparison of exponents."""
        return self.is_negative(self.sub(key, bound))

    def label(self, key: ExponentKey) -> str:
        """Human-readable exponent, e.g. ``1-1a`` or ``3/2``."""
        if self.kind == RegimeKind.RATIONAL:
            q = Fraction(key[0], self.n0)
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        if self.kind == RegimeKind.IRRATIONAL:
            k, p = key
            if p == 0:
                return str(k)
            return f"{k}-{p}a"
        return str(key[0])

    def to_dict(self) -> dict[str, Any]:
        """Serialize to the configuration's alpha block."""
        data: dict[str, Any] = {"regime": self.kind.value}
        if self.kind == RegimeKind.IRRATIONAL:
            data["value"] = self.value
        elif self.kind == RegimeKind.RATIONAL:
            data["m0"] = self.m0
            data["n0"] = self.n0
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AlphaRegime":
        """Deserialize from the configuration's alpha block."""
        kind = RegimeKind(data["regime"])
        if kind == RegimeKind.IRRATIONAL:
            return cls.irrational(float(data["value"]))
        if kind == RegimeKind.RATIONAL:
            return cls.rational(int(data["m0"]), int(data["n0"]))
        return cls(kind)

    def __str__(self) -> str:
        if self.kind == RegimeKind.RATIONAL:
            return f"rational({self.m0}/{self.n0})"
        if self.kind == RegimeKind.IRRATIONAL:
            return f"irrational({self.value!r})"
        return self.kind.value
