"""Exact Bernoulli tail probabilities and instance checks of the tail bound
``P(|S_m - m/2| >= eps*m/2) <= sqrt(2)/(eps*sqrt(m))`` for ``eps <= 1/12``, ``m >= 48/eps``.

Here S_m counts the +1 coordinates of a uniformly random sign vector of length m.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Iterator, NamedTuple

from jnseq.errors import DomainError
from jnseq.numerics import Bound, binom
from jnseq.reports import BoundReport

log = logging.getLogger(__name__)

MAX_EPS = Fraction(1, 12)
GRID_COLUMNS = ["m", "eps_num", "eps_den", "tail_num", "tail_den", "tail_decimal", "holds"]


def check_eps(eps: Fraction) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps <= MAX_EPS:
        raise DomainError(f"eps must lie in (0, 1/12], got {eps}")
    return eps


def in_tail(k: int, m: int, eps: Fraction) -> bool:
    """``|k - m/2| >= eps*m/2``, evaluated as ``|2k - m| * den >= num * m``."""
    return abs(2 * k - m) * eps.denominator >= eps.numerator * m


def binomial_row(m: int) -> Iterator[tuple[int, int]]:
    """Yield ``(k, C(m, k))`` for k = 0..m by the multiplicative recurrence."""
    c = 1
    for k in range(m + 1):
        yield k, c
        c = c * (m - k) // (k + 1)


def point_probability(m: int, k: int) -> Fraction:
    return Fraction(binom(m, k), 1 << m)


def tail_count(m: int, eps: Fraction) -> int:
    """Number of sign vectors of length m in the tail event."""
    eps = Fraction(eps)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    return sum(c for k, c in binomial_row(m) if in_tail(k, m, eps))


def tail_probability(m: int, eps: Fraction) -> Fraction:
    if m < 0:
        raise DomainError("m must be nonnegative")
    return Fraction(tail_count(m, eps), 1 << m)


def band_probability(m: int, eps: Fraction) -> Fraction:
    """Probability of the complementary open band ``|S_m - m/2| < eps*m/2``."""
    eps = Fraction(eps)
    return Fraction(sum(c for k, c in binomial_row(m) if not in_tail(k, m, eps)), 1 << m)


class DeltaProbability(NamedTuple):
    value: Fraction
    degenerate: bool


def delta_probability(n: int, size_b: int, eps: Fraction) -> DeltaProbability:
    """Probability under the uniform measure on {-1,1}^n that the +1-count on a
    fixed index set of size ``size_b`` deviates from ``size_b/2`` by at least
    ``eps*size_b/2``.

    The event only constrains the ``size_b`` coordinates, so this is the tail
    over ``size_b`` coordinates, independent of n. An empty index set makes the
    event all of {-1,1}^n; that value 1 is returned with ``degenerate=True``.
    """
    if not 0 <= size_b <= n:
        raise DomainError(f"need 0 <= size_b <= n, got size_b={size_b}, n={n}")
    if size_b == 0:
        return DeltaProbability(Fraction(1), True)
    return DeltaProbability(tail_probability(size_b, eps), False)


def bollobas_bound(m: int, eps: Fraction) -> Bound:
    return Bound(sqrt_c=Fraction(eps), sqrt_m=m)


def check_bollobas(m: int, eps: Fraction) -> BoundReport:
    """Check the tail bound at ``(m, eps)`` exactly.

    Raises :class:`DomainError` when ``eps`` is outside (0, 1/12] or ``m*eps < 48``.
    A failing verdict is logged at error level; callers must treat it as a bug.
    """
    eps = Fraction(eps)
    if not 0 < eps <= MAX_EPS:
        raise DomainError(f"hypothesis eps in (0, 1/12] fails: eps={eps}")
    if m * eps < 48:
        raise DomainError(f"hypothesis m >= 48/eps fails: m={m}, 48/eps={48 / eps}")
    report = BoundReport.check(
        m, tail_probability(m, eps), bollobas_bound(m, eps), "bollobas",
        {"eps": eps, "m": m}, context="P(|S_m - m/2| >= eps*m/2) <= sqrt(2)/(eps*sqrt(m))",
    )
    if not report.holds:
        log.error("tail bound FAILED at m=%d eps=%s: tail=%s", m, eps, report.lhs)
    return report


def bollobas_grid(eps_values, extra_m=(1000, 2000), span: int = 200):
    """All grid points: m from ceil(48/eps) to ceil(48/eps)+span, plus ``extra_m``.

    Returns ``(m, eps)`` pairs sorted by eps descending, then m.
    """
    points = []
    for eps in sorted({Fraction(e) for e in eps_values}, reverse=True):
        lo = math.ceil(48 / eps)
        ms = sorted(set(range(lo, lo + span + 1)) | set(extra_m))
        points.extend((m, eps) for m in ms)
    return points
