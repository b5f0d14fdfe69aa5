"""Finitely supported signed measures with exact rational weights."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple

_MINUS = ("-", "−")


@dataclass(frozen=True, slots=True)
class SignVector:
    """An element of {-1, 1}^level packed as a bit pattern (bit i set iff s(i) = +1)."""

    level: int
    bits: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        if not 0 <= self.bits < (1 << self.level):
            raise ValueError(f"bit pattern {self.bits} does not fit level {self.level}")

    @classmethod
    def from_signs(cls, signs: Iterable[int]) -> SignVector:
        signs = list(signs)
        bits = 0
        for i, v in enumerate(signs):
            if v not in (-1, 1):
                raise ValueError(f"sign must be -1 or 1, got {v!r}")
            if v == 1:
                bits |= 1 << i
        return cls(len(signs), bits)

    @classmethod
    def parse(cls, text: str) -> SignVector:
        signs = []
        for ch in text:
            if ch == "+":
                signs.append(1)
            elif ch in _MINUS:
                signs.append(-1)
            else:
                raise ValueError(f"bad sign character {ch!r} in {text!r}")
        return cls.from_signs(signs)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.level:
            raise IndexError(i)
        return 1 if self.bits >> i & 1 else -1

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(self[i] for i in range(self.level))

    def __neg__(self) -> SignVector:
        return SignVector(self.level, ~self.bits & ((1 << self.level) - 1))

    def __str__(self) -> str:
        return "".join("+" if self.bits >> i & 1 else "-" for i in range(self.level))


@dataclass(frozen=True, slots=True)
class SigmaPoint:
    """The point (index, level) of Sigma_level; requires index < level."""

    index: int
    level: int

    def __post_init__(self):
        if not 0 <= self.index < self.level:
            raise ValueError(f"need 0 <= index < level, got {self.index}@{self.level}")

    @classmethod
    def parse(cls, text: str) -> SigmaPoint:
        i, sep, n = text.partition("@")
        if not sep:
            raise ValueError(f"sigma point must look like 'i@n': {text!r}")
        return cls(int(i), int(n))

    def __str__(self) -> str:
        return f"{self.index}@{self.level}"


class ProductPoint(NamedTuple):
    first: SignVector
    second: SigmaPoint

    def __str__(self) -> str:
        return f"({self.first},{self.second})"


class FiniteSignedMeasure:
    """Immutable map from points to nonzero rational weights.

    Points may be any hashable values: :class:`ProductPoint` on the discrete
    product, or coordinate pairs after a push-forward.
    """

    __slots__ = ("_atoms",)

    def __init__(self, atoms: Mapping[Hashable, Fraction] | None = None):
        self._atoms = {p: Fraction(w) for p, w in (atoms or {}).items() if w != 0}

    @property
    def atoms(self) -> Mapping[Hashable, Fraction]:
        return dict(self._atoms)

    def items(self) -> Iterator[tuple[Hashable, Fraction]]:
        return iter(self._atoms.items())

    @property
    def support(self) -> frozenset:
        return frozenset(self._atoms)

    def weight(self, point: Hashable) -> Fraction:
        return self._atoms.get(point, Fraction(0))

    def __len__(self) -> int:
        return len(self._atoms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSignedMeasure):
            return NotImplemented
        return self._atoms == other._atoms

    def __repr__(self) -> str:
        return f"FiniteSignedMeasure({len(self._atoms)} atoms)"


def make_measure(pairs: Iterable[tuple[Hashable, Fraction]]) -> FiniteSignedMeasure:
    """Build a measure from ``(point, weight)`` pairs; zero weights are dropped.

    Raises ``ValueError`` naming the point when a point occurs twice.
    """
    atoms: dict[Hashable, Fraction] = {}
    for point, weight in pairs:
        if point in atoms:
            raise ValueError(f"duplicate point {point}")
        atoms[point] = Fraction(weight)
    return FiniteSignedMeasure(atoms)


def total_variation(mu: FiniteSignedMeasure) -> Fraction:
    return sum((abs(w) for _, w in mu.items()), Fraction(0))


def total_mass(mu: FiniteSignedMeasure) -> Fraction:
    return sum((w for _, w in mu.items()), Fraction(0))


def evaluate(mu: FiniteSignedMeasure, membership: Callable[[Any], bool]) -> Fraction:
    """mu(E) for the set E given by ``membership``."""
    return sum((w for p, w in mu.items() if membership(p)), Fraction(0))


def integrate(mu: FiniteSignedMeasure, f: Callable[[Any], Any]):
    """Sum of weight * f(point) over the atoms.

    Exact when ``f`` returns rationals or integers; floats propagate as floats.
    """
    total = Fraction(0)
    for p, w in mu.items():
        total = total + w * f(p)
    return total


def _encode_point(point: Hashable) -> Any:
    if isinstance(point, ProductPoint):
        return [str(point.first), str(point.second)]
    if isinstance(point, tuple):
        return [str(c) if isinstance(c, Fraction) else c for c in point]
    return str(point)


def to_json_obj(mu: FiniteSignedMeasure) -> list[dict]:
    """JSON-ready list of ``{point, weight_num, weight_den}`` in a deterministic order."""
    rows = [
        {"point": _encode_point(p), "weight_num": w.numerator, "weight_den": w.denominator}
        for p, w in mu.items()
    ]
    rows.sort(key=lambda r: repr(r["point"]))
    return rows


def from_json_obj(rows: Iterable[dict]) -> FiniteSignedMeasure:
    """Inverse of :func:`to_json_obj` for measures on the discrete product."""
    pairs = []
    for row in rows:
        first, second = row["point"]
        point = ProductPoint(SignVector.parse(first), SigmaPoint.parse(second))
        pairs.append((point, Fraction(row["weight_num"], row["weight_den"])))
    return make_measure(pairs)
