"""Exact rational helpers.

``fractions.Fraction`` is the rational type throughout: it is always stored in
lowest terms with a positive denominator, so equality is structural.
Inequalities with a square root on the right are decided by squaring.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction

DEFAULT_PRECISION = 12


def binom(n: int, k: int) -> int:
    """Binomial coefficient C(n, k); 0 when k > n."""
    if n < 0 or k < 0:
        raise ValueError("binom requires nonnegative arguments")
    return math.comb(n, k)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer literal. Decimal notation is rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"decimals are not accepted, write p/q: {text!r}")
    num, sep, den = text.partition("/")
    try:
        value = Fraction(int(num), int(den)) if sep else Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational p/q: {text!r}") from exc
    return value


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def to_decimal(q: Fraction, precision: int = DEFAULT_PRECISION) -> str:
    """Render ``q`` with ``precision`` significant digits (presentation only)."""
    ctx = decimal.Context(prec=precision, rounding=decimal.ROUND_HALF_EVEN)
    value = ctx.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator))
    return str(value)


def _check_sqrt_args(lhs: Fraction, c: Fraction, m: int) -> None:
    if lhs < 0 or c <= 0 or m < 1:
        raise ValueError("need lhs >= 0, c > 0, m >= 1")


def leq_sqrt_ratio(lhs: Fraction, c: Fraction, m: int) -> bool:
    """``lhs <= sqrt(2) / (c * sqrt(m))``, decided as ``lhs**2 * c**2 * m <= 2``."""
    lhs, c = Fraction(lhs), Fraction(c)
    _check_sqrt_args(lhs, c, m)
    return lhs * lhs * c * c * m <= 2


def lt_sqrt_ratio(lhs: Fraction, c: Fraction, m: int) -> bool:
    lhs, c = Fraction(lhs), Fraction(c)
    _check_sqrt_args(lhs, c, m)
    return lhs * lhs * c * c * m < 2


@dataclass(frozen=True)
class Bound:
    """The value ``rational + sqrt(2)/(sqrt_c*sqrt(sqrt_m))``; the radical term is optional.

    Comparisons ``x <= bound`` are exact: the rational part is moved to the
    left and the remainder is compared by squaring.
    """

    rational: Fraction = Fraction(0)
    sqrt_c: Fraction | None = None
    sqrt_m: int | None = None

    @property
    def has_radical(self) -> bool:
        return self.sqrt_c is not None

    def admits(self, x: Fraction, strict: bool = False) -> bool:
        """True iff ``x <= self`` (or ``x < self`` when ``strict``)."""
        rest = Fraction(x) - self.rational
        if not self.has_radical:
            return rest < 0 if strict else rest <= 0
        if rest < 0:
            return True
        if strict:
            return lt_sqrt_ratio(rest, self.sqrt_c, self.sqrt_m)
        return leq_sqrt_ratio(rest, self.sqrt_c, self.sqrt_m)

    def approx(self) -> float:
        value = float(self.rational)
        if self.has_radical:
            value += math.sqrt(2) / (float(self.sqrt_c) * math.sqrt(self.sqrt_m))
        return value

    def describe(self) -> str:
        parts = []
        if self.rational or not self.has_radical:
            parts.append(format_rational(self.rational))
        if self.has_radical:
            parts.append(f"sqrt(2)/({format_rational(self.sqrt_c)}*sqrt({self.sqrt_m}))")
        return " + ".join(parts)
