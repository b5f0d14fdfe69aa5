"""Exact worst-case rectangle value W(n) = max |mu_n([A]x[B])| over all A, B.

Four routes, cheapest last:

* ``oracle``: every A ⊆ Ω_n and B ⊆ Σ_n (n <= 4).
* ``atoms``: from the materialized atoms of mu_n, best A for every B (n <= 12).
* ``reduction``: for fixed B the best A is {s : sum_B s(i) > 0}, and its value
  depends only on m = |B|:  max_m  sum_k C(m,k)|2k-m| / (2n * 2^m).
* ``closed-form``: sum_k C(m,k)|2k-m| = 2m * C(m-1, floor((m-1)/2)) and the
  m-scan is maximized at m = n, so W(n) = C(n-1, floor((n-1)/2)) / 2^n.

The last two are derived here, not taken on trust; the test suite pins them to
the first two.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from jnseq.concentration import binomial_row
from jnseq.construction import ENUMERATION_CAP, build_mu, plus_counts
from jnseq.errors import DomainError, ResourceLimitError
from jnseq.measures import SignVector
from jnseq.numerics import DEFAULT_PRECISION, binom, to_decimal

ORACLE_CAP = 4
ATOMS_CAP = 12
METHODS = ("oracle", "atoms", "reduction", "closed-form")
DECAY_COLUMNS = ["n", "W_num", "W_den", "W_decimal", "witness_m", "W_times_sqrt_n_decimal", "method", "status"]


@dataclass(frozen=True)
class WorstCaseRecord:
    n: int
    value: Fraction
    witness_b: tuple[int, ...]
    method: str
    witness_a: tuple[SignVector, ...] | None = None
    witness_a_description: str = "majority-positive for witnessB"

    @property
    def witness_m(self) -> int:
        return len(self.witness_b)


def _check_n(n: int) -> None:
    if n < 1:
        raise DomainError("n must be positive")


def worst_value_oracle(n: int) -> WorstCaseRecord:
    """Brute force over all 2^(2^n) * 2^n rectangles.

    The witness is the first maximizer in (B mask, A mask) order with a
    positive value; one exists because negating every vector of A flips the sign.
    """
    _check_n(n)
    if n > ORACLE_CAP:
        raise ResourceLimitError(f"oracle search is limited to n <= {ORACLE_CAP}")
    best, best_b, best_a = -1, 0, 0
    for bm in range(1 << n):
        b = [i for i in range(n) if bm >> i & 1]
        inner = 2 * plus_counts(n, b).astype(np.int64) - len(b)
        sums = np.zeros(1, dtype=np.int64)
        for c in inner:
            sums = np.concatenate([sums, sums + c])
        top = int(np.abs(sums).max())
        if top > best:
            best, best_b, best_a = top, bm, int(np.flatnonzero(sums == top)[0])
    witness_a = tuple(SignVector(n, s) for s in range(1 << n) if best_a >> s & 1)
    witness_b = tuple(i for i in range(n) if best_b >> i & 1)
    return WorstCaseRecord(n, Fraction(best, n << n), witness_b, "oracle", witness_a,
                           "explicit maximizer")


def worst_value_atoms(n: int) -> WorstCaseRecord:
    """Maximize over every B using the atoms of mu_n; the best A for a fixed B
    collects the vectors s whose weights over B sum to something positive."""
    _check_n(n)
    if n > min(ATOMS_CAP, ENUMERATION_CAP):
        raise ResourceLimitError(f"atom enumeration search is limited to n <= {ATOMS_CAP}")
    mu = build_mu(n)
    scale = n << n
    weights = np.zeros((1 << n, n), dtype=np.int64)
    for (s, sigma), w in mu.items():
        weights[s.bits, sigma.index] = int(w * scale)
    best, best_b = -1, 0
    b_rows = np.array([[bm >> i & 1 for i in range(n)] for bm in range(1 << n)], dtype=np.int64)
    chunk = max(1, (1 << 22) >> n)
    for start in range(0, 1 << n, chunk):
        sums = weights @ b_rows[start:start + chunk].T
        gains = np.clip(sums, 0, None).sum(axis=0)
        j = int(np.argmax(gains))
        if int(gains[j]) > best:
            best, best_b = int(gains[j]), start + j
    witness_b = tuple(i for i in range(n) if best_b >> i & 1)
    return WorstCaseRecord(n, Fraction(best, scale), witness_b, "atoms")


def abs_deviation_sum(m: int) -> int:
    """sum_k C(m,k) |2k - m|, summed term by term."""
    return sum(c * abs(2 * k - m) for k, c in binomial_row(m))


def abs_deviation_closed(m: int) -> int:
    """Closed form of :func:`abs_deviation_sum` (m >= 1)."""
    return 2 * m * binom(m - 1, (m - 1) // 2)


def worst_value_reduction(n: int) -> WorstCaseRecord:
    """Scan m = 1..n; ties go to the smaller m."""
    _check_n(n)
    best, best_m = Fraction(-1), 0
    for m in range(1, n + 1):
        value = Fraction(abs_deviation_sum(m), (2 * n) << m)
        if value > best:
            best, best_m = value, m
    return WorstCaseRecord(n, best, tuple(range(best_m)), "reduction")


def worst_value_closed_form(n: int) -> WorstCaseRecord:
    _check_n(n)
    m = n if n % 2 else n - 1
    return WorstCaseRecord(n, Fraction(binom(n - 1, (n - 1) // 2), 1 << n), tuple(range(m)),
                           "closed-form")


_ROUTES = {
    "oracle": worst_value_oracle,
    "atoms": worst_value_atoms,
    "reduction": worst_value_reduction,
    "closed-form": worst_value_closed_form,
}


def worst_value(n: int, method: str = "closed-form") -> WorstCaseRecord:
    try:
        route = _ROUTES[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}") from None
    return route(n)


@dataclass(frozen=True)
class DecayRow:
    n: int
    method: str
    record: WorstCaseRecord | None = None
    error: str | None = None

    def row(self, precision: int = DEFAULT_PRECISION) -> dict:
        if self.record is None:
            return {"n": self.n, "W_num": "", "W_den": "", "W_decimal": "", "witness_m": "",
                    "W_times_sqrt_n_decimal": "", "method": self.method, "status": self.error}
        w = self.record.value
        return {
            "n": self.n,
            "W_num": w.numerator,
            "W_den": w.denominator,
            "W_decimal": to_decimal(w, precision),
            "witness_m": self.record.witness_m,
            "W_times_sqrt_n_decimal": times_sqrt_decimal(w, self.n, precision),
            "method": self.method,
            "status": "ok",
        }


def times_sqrt_decimal(q: Fraction, n: int, precision: int = DEFAULT_PRECISION) -> str:
    """q * sqrt(n) rounded to ``precision`` significant digits (advisory only)."""
    ctx = decimal.Context(prec=precision + 5)
    value = ctx.multiply(ctx.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator)),
                         ctx.sqrt(decimal.Decimal(n)))
    text = str(decimal.Context(prec=precision).plus(value))
    if "." in text and "E" not in text:
        text = text.rstrip("0").rstrip(".")
    return text


def decay_table(n_list, method: str = "closed-form") -> list[DecayRow]:
    """W(n) for each requested n, in the given order; failures are reported inline."""
    rows = []
    for n in n_list:
        try:
            rows.append(DecayRow(n, method, worst_value(n, method)))
        except (ResourceLimitError, DomainError) as exc:
            rows.append(DecayRow(n, method, error=f"{type(exc).__name__}: {exc}"))
    return rows
