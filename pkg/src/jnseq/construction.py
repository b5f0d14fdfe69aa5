"""The measures mu_n and their values on clopen rectangles.

mu_n puts weight s(i)/(n*2^n) on each point (s, i) with s in {-1,1}^n and
i in {0, .., n-1}. Its value on a rectangle [A]x[B] only sees A∩Ω_n and B∩Σ_n.

Every level-n rectangle is reduced to a *histogram*: h[k] is the number of
s in A having exactly k coordinates equal to +1 inside B. With m = |B|, the
inner sum over B of s(i) is 2k - m, so

    mu_n([A]x[B]) = sum_k h[k] * (2k - m) / (n * 2^n)

and everything checked here (value, |A|, the split along the unbalanced set
Delta) is a function of h. Structured A-sets are unions of whole k-classes,
which keeps them exact for n far beyond explicit enumeration.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from jnseq.concentration import MAX_EPS, binomial_row, check_eps, delta_probability, in_tail
from jnseq.errors import DomainError, ResourceLimitError, SpecError
from jnseq.measures import FiniteSignedMeasure, ProductPoint, SigmaPoint, SignVector
from jnseq.numerics import Bound, format_rational, parse_rational
from jnseq.reports import BoundReport

ENUMERATION_CAP = 16
MASK_CAP = 24


def build_mu(n: int, cap: int = ENUMERATION_CAP) -> FiniteSignedMeasure:
    """Materialize mu_n atom by atom (n * 2^n atoms)."""
    if n < 1:
        raise DomainError("n must be positive")
    if n > cap:
        raise ResourceLimitError(f"build_mu({n}) exceeds enumeration cap {cap} "
                                 f"({n * 2 ** n} atoms)")
    den = n << n
    plus, minus = Fraction(1, den), Fraction(-1, den)
    sigma = [SigmaPoint(i, n) for i in range(n)]
    atoms = {}
    for bits in range(1 << n):
        s = SignVector(n, bits)
        for i in range(n):
            atoms[ProductPoint(s, sigma[i])] = plus if bits >> i & 1 else minus
    return FiniteSignedMeasure(atoms)


# -- level-n sets of sign vectors ------------------------------------------------

@dataclass(frozen=True)
class SignList:
    """Explicit sign vectors, as sorted distinct bit patterns."""

    bits: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SignMask:
    """Indicator over all 2^n bit patterns."""

    mask: np.ndarray


@dataclass(frozen=True)
class SignClasses:
    """Union of the classes {s : #{i in B : s(i) = +1} = k} for k in ``ks``."""

    ks: frozenset[int]


SignSet = Union[SignList, SignMask, SignClasses]


@functools.lru_cache(maxsize=4)
def _patterns(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.uint32 if n <= 32 else np.uint64)


def b_mask(b: Iterable[int]) -> int:
    out = 0
    for i in b:
        out |= 1 << i
    return out


def plus_counts(n: int, b: Iterable[int]) -> np.ndarray:
    """k(s) = #{i in B : s(i) = +1} for every bit pattern s of length n."""
    if n > MASK_CAP:
        raise ResourceLimitError(f"level {n} exceeds mask cap {MASK_CAP}")
    pats = _patterns(n)
    return np.bitwise_count(pats & pats.dtype.type(b_mask(b)))


def class_sizes(n: int, m: int) -> list[int]:
    """N[k] = |{s in Ω_n : k(s) = k}| = C(m, k) * 2^(n-m)."""
    shift = n - m
    return [c << shift for _, c in binomial_row(m)]


@dataclass(frozen=True, eq=False)
class Rectangle:
    """A concrete level-n rectangle (A∩Ω_n, B∩Σ_n)."""

    n: int
    a: SignSet
    b: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.b)

    @classmethod
    def from_sets(cls, n: int, a: Iterable, b: Iterable[int]) -> Rectangle:
        bits = set()
        for s in a:
            if isinstance(s, str):
                s = SignVector.parse(s)
            if s.level != n:
                raise DomainError(f"sign vector {s} is not in level {n}")
            bits.add(s.bits)
        idx = sorted(set(b))
        if idx and not (0 <= idx[0] and idx[-1] < n):
            raise DomainError(f"B must be a subset of {{0..{n - 1}}}")
        return cls(n, SignList(tuple(sorted(bits))), tuple(idx))

    def histogram(self) -> list[int]:
        """h[k] = #{s in A : k coordinates of s inside B are +1}, k = 0..|B|."""
        return list(self._histogram)

    @functools.cached_property
    def _histogram(self) -> tuple[int, ...]:
        m = self.m
        if isinstance(self.a, SignClasses):
            sizes = class_sizes(self.n, m)
            return tuple(sizes[k] if k in self.a.ks else 0 for k in range(m + 1))
        if isinstance(self.a, SignList):
            bm = b_mask(self.b)
            hist = [0] * (m + 1)
            for bits in self.a.bits:
                hist[(bits & bm).bit_count()] += 1
            return tuple(hist)
        counts = plus_counts(self.n, self.b)[self.a.mask]
        return tuple(int(c) for c in np.bincount(counts, minlength=m + 1))

    def size_a(self) -> int:
        return sum(self.histogram())

    def bit_patterns(self) -> list[int]:
        """Members of A as bit patterns (enumerates Ω_n for non-explicit sets)."""
        if isinstance(self.a, SignList):
            return list(self.a.bits)
        if isinstance(self.a, SignMask):
            return [int(x) for x in np.flatnonzero(self.a.mask)]
        bm = b_mask(self.b)
        if self.n > MASK_CAP:
            raise ResourceLimitError(f"level {self.n} exceeds mask cap {MASK_CAP}")
        return [x for x in range(1 << self.n) if (x & bm).bit_count() in self.a.ks]

    def members(self) -> list[SignVector]:
        return [SignVector(self.n, x) for x in self.bit_patterns()]


def _as_rectangle(n: int, a, b) -> Rectangle:
    if isinstance(a, (SignList, SignMask, SignClasses)):
        idx = tuple(sorted(set(b)))
        if idx and not (0 <= idx[0] and idx[-1] < n):
            raise DomainError(f"B must be a subset of {{0..{n - 1}}}")
        return Rectangle(n, a, idx)
    return Rectangle.from_sets(n, a, b)


def _signed_sum(hist: list[int], m: int, ks=None) -> int:
    return sum(h * (2 * k - m) for k, h in enumerate(hist) if h and (ks is None or k in ks))


def rectangle_value(rect: Rectangle) -> Fraction:
    return Fraction(_signed_sum(rect.histogram(), rect.m), rect.n << rect.n)


def evaluate_rectangle(n: int, a, b) -> Fraction:
    """mu_n([A]x[B]) exactly.

    ``a`` is a collection of sign vectors of level n (or their ``+-`` strings),
    or one of the set types of this module; ``b`` is a collection of indices.
    """
    return rectangle_value(_as_rectangle(n, a, b))


def dagger_bound(n: int, size_a: int, size_b: int) -> Fraction:
    """(|A|/2^n) * (|B|/n), the product bound on |mu_n([A]x[B])|."""
    if not 0 <= size_a <= 1 << n:
        raise DomainError(f"|A| = {size_a} out of range for level {n}")
    if not 0 <= size_b <= n:
        raise DomainError(f"|B| = {size_b} out of range for level {n}")
    return Fraction(size_a * size_b, n << n)


def remark_bound(n: int, size_b: int, eps: Fraction) -> Bound:
    """Bound on |mu_n([A]x[B])| depending only on |B|.

    ``|B|/n`` below the cutoff ``|B| < 2/eps^4``; otherwise
    ``sqrt(2)/(eps*sqrt(|B|)) + eps*|B|/n``.
    """
    eps = check_eps(eps)
    if not 0 <= size_b <= n:
        raise DomainError(f"|B| = {size_b} out of range for level {n}")
    if size_b * eps ** 4 < 2:
        return Bound(Fraction(size_b, n))
    return Bound(eps * size_b / n, sqrt_c=eps, sqrt_m=size_b)


def uniform_threshold(eps: Fraction) -> int:
    """N = ceil(eps^-5): every level n >= N has |mu_n([A]x[B])| < 2*eps for all rectangles."""
    eps = check_eps(eps)
    return math.ceil(1 / eps ** 5)


def delta_classes(m: int, eps: Fraction) -> frozenset[int]:
    return frozenset(k for k in range(m + 1) if in_tail(k, m, eps))


# -- the Delta-split -------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionTrace:
    """Both halves of the split of A along Delta, with the checked inequalities.

    ``t1`` is |mu_n| on (A∩Δ)x B, ``t2`` on (A∖Δ)x B. ``reports`` maps a verdict
    label to its exact check:

    * ``a``: |mu_n([A]x[B])| <= t1 + t2
    * ``b_count``: t1 <= |A∩Δ|*|B|/(n*2^n);  ``b``: t1 <= P_n(Δ)
    * ``c_chain``: t2 < eps*|B|/n;  ``c``: t2 < eps
      (both non-strict when A∖Δ or B is empty)
    * ``d``: t1 <= sqrt(2)/(eps*sqrt(|B|)), only when |B| >= 48/eps
    """

    n: int
    eps: Fraction
    size_b: int
    value: Fraction
    t1: Fraction
    t2: Fraction
    p_delta: Fraction
    reports: dict
    degenerate: bool

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.reports.values())


def decompose_rectangle(rect: Rectangle, eps: Fraction) -> DecompositionTrace:
    eps = check_eps(eps)
    n, m = rect.n, rect.m
    den = n << n
    hist = rect.histogram()
    value = Fraction(_signed_sum(hist, m), den)
    params = {"eps": eps, "sizeB": m}
    if m == 0:
        zero = Fraction(0)
        reports = {
            "a": BoundReport.check(n, abs(value), Bound(zero), "decomp_a", params),
            "c": BoundReport.check(n, zero, Bound(eps), "decomp_c", params),
        }
        p = delta_probability(n, 0, eps).value
        return DecompositionTrace(n, eps, 0, value, zero, zero, p, reports, True)

    ks = delta_classes(m, eps)
    s1 = _signed_sum(hist, m, ks)
    s2 = _signed_sum(hist, m) - s1
    t1, t2 = Fraction(abs(s1), den), Fraction(abs(s2), den)
    a_delta = sum(hist[k] for k in ks)
    outside_nonempty = sum(hist) > a_delta
    p_delta = delta_probability(n, m, eps).value
    reports = {
        "a": BoundReport.check(n, abs(value), Bound(t1 + t2), "decomp_a", params),
        "b_count": BoundReport.check(n, t1, Bound(Fraction(a_delta * m, den)), "decomp_b_count", params),
        "b": BoundReport.check(n, t1, Bound(p_delta), "decomp_b", params),
        "c_chain": BoundReport.check(n, t2, Bound(eps * m / n), "decomp_c_chain", params,
                                     strict=outside_nonempty),
        "c": BoundReport.check(n, t2, Bound(eps), "decomp_c", params, strict=outside_nonempty),
    }
    if m * eps >= 48:
        reports["d"] = BoundReport.check(n, t1, Bound(sqrt_c=eps, sqrt_m=m), "decomp_d", params)
    return DecompositionTrace(n, eps, m, value, t1, t2, p_delta, reports, False)


def decompose_estimate(n: int, a, b, eps: Fraction) -> DecompositionTrace:
    """Split |mu_n([A]x[B])| along the unbalanced set Delta_{n,eps} and check
    each estimate of the convergence argument exactly.

    An empty B gives the trivial trace (both terms 0) with ``degenerate=True``.
    """
    return decompose_rectangle(_as_rectangle(n, a, b), eps)


def rectangle_reports(rect: Rectangle, eps_list: Iterable[Fraction]) -> list[BoundReport]:
    """Every per-rectangle check: product bound, then per eps the |B|-only
    bound, the Delta-split verdicts and, past the uniform threshold, ``< 2*eps``."""
    n, m = rect.n, rect.m
    hist = rect.histogram()
    value = Fraction(_signed_sum(hist, m), n << n)
    size_a = sum(hist)
    out = [BoundReport.check(n, abs(value), Bound(dagger_bound(n, size_a, m)), "dagger",
                             {"sizeA": size_a, "sizeB": m})]
    for eps in eps_list:
        eps = check_eps(eps)
        out.append(BoundReport.check(n, abs(value), remark_bound(n, m, eps), "remark",
                                     {"eps": eps, "sizeB": m}))
        out.extend(decompose_rectangle(rect, eps).reports.values())
        if n >= uniform_threshold(eps):
            out.append(BoundReport.check(n, abs(value), Bound(2 * eps), "two_eps",
                                         {"eps": eps}, strict=True))
    return out


# -- rectangle specifications ----------------------------------------------------

@dataclass(frozen=True)
class ExplicitA:
    vectors: tuple[SignVector, ...]


@dataclass(frozen=True)
class AllOfOmegaN:
    pass


@dataclass(frozen=True)
class OptimalForB:
    """{s : sum over B of s(i) > 0}."""


@dataclass(frozen=True)
class MajorityPositiveForB:
    """{s : sum over B of s(i) >= 0}; ties on B included."""


@dataclass(frozen=True)
class DeltaSet:
    eps: Fraction


@dataclass(frozen=True)
class RandomA:
    p: Fraction
    seed: int


@dataclass(frozen=True)
class ExplicitB:
    indices: tuple[int, ...]


@dataclass(frozen=True)
class AllOfSigmaN:
    pass


@dataclass(frozen=True)
class ArithmeticB:
    start: int
    step: int


@dataclass(frozen=True)
class RandomB:
    p: Fraction
    seed: int


@dataclass(frozen=True)
class RectangleSpec:
    a_spec: object
    b_spec: object

    def to_json(self) -> dict:
        return {"A": _a_to_json(self.a_spec), "B": _b_to_json(self.b_spec)}

    @classmethod
    def from_json(cls, obj: dict, line: int | None = None) -> RectangleSpec:
        try:
            return cls(_a_from_json(obj["A"]), _b_from_json(obj["B"]))
        except SpecError as exc:
            raise SpecError(str(exc), line) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed rectangle spec: {exc!r}", line) from exc

    def label(self) -> str:
        import json
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _probability(text) -> Fraction:
    p = parse_rational(str(text))
    if not 0 <= p <= 1:
        raise SpecError(f"probability out of [0, 1]: {text}")
    return p


def _a_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "explicit":
        return ExplicitA(tuple(SignVector.parse(v) for v in obj["vectors"]))
    if kind == "all":
        return AllOfOmegaN()
    if kind == "optimal":
        return OptimalForB()
    if kind == "majority":
        return MajorityPositiveForB()
    if kind == "delta":
        return DeltaSet(parse_rational(str(obj["eps"])))
    if kind == "random":
        return RandomA(_probability(obj["p"]), int(obj["seed"]))
    raise SpecError(f"unknown A kind {kind!r}")


def _b_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "explicit":
        return ExplicitB(tuple(int(i) for i in obj["indices"]))
    if kind == "all":
        return AllOfSigmaN()
    if kind == "arith":
        start, step = int(obj["start"]), int(obj["step"])
        if start < 0 or step < 1:
            raise SpecError("arith needs start >= 0 and step >= 1")
        return ArithmeticB(start, step)
    if kind == "random":
        return RandomB(_probability(obj["p"]), int(obj["seed"]))
    raise SpecError(f"unknown B kind {kind!r}")


def _a_to_json(a) -> dict:
    if isinstance(a, ExplicitA):
        return {"kind": "explicit", "vectors": [str(v) for v in a.vectors]}
    if isinstance(a, AllOfOmegaN):
        return {"kind": "all"}
    if isinstance(a, OptimalForB):
        return {"kind": "optimal"}
    if isinstance(a, MajorityPositiveForB):
        return {"kind": "majority"}
    if isinstance(a, DeltaSet):
        return {"kind": "delta", "eps": format_rational(a.eps)}
    if isinstance(a, RandomA):
        return {"kind": "random", "p": format_rational(a.p), "seed": a.seed}
    raise TypeError(a)


def _b_to_json(b) -> dict:
    if isinstance(b, ExplicitB):
        return {"kind": "explicit", "indices": list(b.indices)}
    if isinstance(b, AllOfSigmaN):
        return {"kind": "all"}
    if isinstance(b, ArithmeticB):
        return {"kind": "arith", "start": b.start, "step": b.step}
    if isinstance(b, RandomB):
        return {"kind": "random", "p": format_rational(b.p), "seed": b.seed}
    raise TypeError(b)


def _rng(seed: int, n: int, which: int) -> np.random.Generator:
    # Stream keyed by (seed, level, A-or-B); element j takes the j-th draw.
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), n, which])))


def _bernoulli(rng: np.random.Generator, p: Fraction, size: int) -> np.ndarray:
    if p.denominator >= 2**63:
        raise DomainError("probability denominator too large")
    dtype = next(t for t in (np.uint8, np.uint16, np.uint32, np.int64) if p.denominator <= np.iinfo(t).max)
    draws = rng.integers(0, p.denominator, size=size, dtype=dtype)
    return draws < p.numerator


def resolve_b(spec, n: int) -> tuple[int, ...]:
    if isinstance(spec, ExplicitB):
        return tuple(sorted({i for i in spec.indices if 0 <= i < n}))
    if isinstance(spec, AllOfSigmaN):
        return tuple(range(n))
    if isinstance(spec, ArithmeticB):
        return tuple(range(spec.start, n, spec.step))
    if isinstance(spec, RandomB):
        return tuple(int(i) for i in np.flatnonzero(_bernoulli(_rng(spec.seed, n, 1), spec.p, n)))
    raise TypeError(spec)


def resolve(spec: RectangleSpec, n: int) -> Rectangle:
    """Materialize ``spec`` at level n. Deterministic in (spec, n)."""
    if n < 1:
        raise DomainError("n must be positive")
    b = resolve_b(spec.b_spec, n)
    m = len(b)
    a = spec.a_spec
    if isinstance(a, ExplicitA):
        aset = SignList(tuple(sorted({v.bits for v in a.vectors if v.level == n})))
    elif isinstance(a, AllOfOmegaN):
        aset = SignClasses(frozenset(range(m + 1)))
    elif isinstance(a, OptimalForB):
        aset = SignClasses(frozenset(k for k in range(m + 1) if 2 * k > m))
    elif isinstance(a, MajorityPositiveForB):
        aset = SignClasses(frozenset(k for k in range(m + 1) if 2 * k >= m))
    elif isinstance(a, DeltaSet):
        aset = SignClasses(delta_classes(m, check_eps(a.eps)))
    elif isinstance(a, RandomA):
        if n > MASK_CAP:
            raise ResourceLimitError(f"random A at level {n} exceeds mask cap {MASK_CAP}")
        aset = SignMask(_bernoulli(_rng(a.seed, n, 0), a.p, 1 << n))
    else:
        raise TypeError(a)
    return Rectangle(n, aset, b)


_SAMPLE_PS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


def random_specs(count: int, seed: int, structured: bool = True) -> list[RectangleSpec]:
    """``count`` reproducible random rectangle specs derived from ``seed``.

    B is always random. A is random in most specs; with ``structured`` every
    fourth spec uses an optimal, majority or Delta set instead, so the samples
    also reach the large values.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), 0xA5])))
    specs = []
    for j in range(count):
        sub = int(rng.integers(0, 2**63))
        pb = _SAMPLE_PS[int(rng.integers(0, 3))]
        pa = _SAMPLE_PS[int(rng.integers(0, 3))]
        if structured and j % 4 == 3:
            a = (OptimalForB(), MajorityPositiveForB(), DeltaSet(MAX_EPS))[j // 4 % 3]
        else:
            a = RandomA(pa, sub)
        specs.append(RectangleSpec(a, RandomB(pb, sub ^ 0x5DEECE66D)))
    return specs


# -- exhaustive sweep over all rectangles of a small level -------------------------

EXHAUSTIVE_CAP = 4


def subset_histograms(k_of: np.ndarray, m: int) -> np.ndarray:
    """Histogram rows for every subset A of Ω_n, indexed by the 2^(2^n) subset masks."""
    hist = np.zeros((1, m + 1), dtype=np.int64)
    for k in k_of:
        step = np.zeros(m + 1, dtype=np.int64)
        step[k] = 1
        hist = np.concatenate([hist, hist + step])
    return hist


@dataclass
class SweepSummary:
    n: int
    rectangles: int = 0
    failures: dict = None

    def __post_init__(self):
        if self.failures is None:
            self.failures = {}

    def fail(self, kind: str, count: int) -> None:
        self.failures[kind] = self.failures.get(kind, 0) + int(count)

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())


def sweep_all_rectangles(n: int, eps_list: Iterable[Fraction] = (MAX_EPS,)) -> SweepSummary:
    """Check the product bound, the |B|-only bound and the Delta-split verdicts
    on every rectangle of level n (vectorized integer arithmetic)."""
    if n > EXHAUSTIVE_CAP:
        raise ResourceLimitError(f"exhaustive sweep is limited to n <= {EXHAUSTIVE_CAP}")
    eps_list = [check_eps(e) for e in eps_list]
    out = SweepSummary(n)
    full = 1 << n
    den = n << n
    for bm in range(full):
        b = [i for i in range(n) if bm >> i & 1]
        m = len(b)
        k_of = plus_counts(n, b)
        hist = subset_histograms(k_of, m)
        weights = np.array([2 * k - m for k in range(m + 1)], dtype=np.int64)
        total = hist @ weights
        size_a = hist.sum(axis=1)
        out.rectangles += len(hist)
        out.fail("dagger", np.count_nonzero(np.abs(total) > size_a * m))
        for eps in eps_list:
            # n <= 4 keeps |B| below both 2/eps^4 and 48/eps.
            num, eden = eps.numerator, eps.denominator
            out.fail("remark", np.count_nonzero(np.abs(total) > m << n))
            if m == 0:
                out.fail("decomp_a", np.count_nonzero(total != 0))
                continue
            in_delta = np.array([in_tail(k, m, eps) for k in range(m + 1)])
            s1 = hist[:, in_delta] @ weights[in_delta]
            s2 = total - s1
            a_delta = hist[:, in_delta].sum(axis=1)
            outside = size_a > a_delta
            delta_size = sum(c for k, c in enumerate(class_sizes(n, m)) if in_delta[k])
            out.fail("decomp_a", np.count_nonzero(np.abs(total) > np.abs(s1) + np.abs(s2)))
            out.fail("decomp_b_count", np.count_nonzero(np.abs(s1) > a_delta * m))
            out.fail("decomp_b", np.count_nonzero(np.abs(s1) > n * delta_size))
            lhs_c = np.abs(s2) * eden
            for kind, rhs in (("decomp_c", num * den), ("decomp_c_chain", num * (m << n))):
                bad = np.where(outside, lhs_c >= rhs, lhs_c > rhs)
                out.fail(kind, np.count_nonzero(bad))
    return out
