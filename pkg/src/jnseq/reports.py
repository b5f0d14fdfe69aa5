"""Inequality check records and their CSV/JSON row form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from jnseq.numerics import DEFAULT_PRECISION, Bound, format_rational, to_decimal

BOUND_REPORT_COLUMNS = ["n", "lhs_num", "lhs_den", "lhs_decimal", "bound_kind", "bound_params", "holds"]


@dataclass(frozen=True)
class BoundReport:
    """Exact verdict of ``lhs <= bound`` (or ``<`` when ``strict``) for one inequality instance."""

    n: int
    lhs: Fraction
    bound: Bound
    holds: bool
    kind: str
    params: dict = field(default_factory=dict)
    strict: bool = False
    context: str = ""

    @classmethod
    def check(cls, n: int, lhs: Fraction, bound: Bound, kind: str, params=None,
              strict: bool = False, context: str = "") -> BoundReport:
        lhs = Fraction(lhs)
        return cls(n, lhs, bound, bound.admits(lhs, strict=strict), kind,
                   dict(params or {}), strict, context)

    def params_text(self) -> str:
        items = [f"{k}={format_rational(v) if isinstance(v, Fraction) else v}"
                 for k, v in self.params.items()]
        items.append(("<" if self.strict else "<=") + " " + self.bound.describe())
        return ";".join(items)

    def row(self, precision: int = DEFAULT_PRECISION) -> dict:
        return {
            "n": self.n,
            "lhs_num": self.lhs.numerator,
            "lhs_den": self.lhs.denominator,
            "lhs_decimal": to_decimal(self.lhs, precision),
            "bound_kind": self.kind,
            "bound_params": self.params_text(),
            "holds": str(self.holds).lower(),
        }
