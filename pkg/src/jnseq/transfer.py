"""Push mu_n forward into concrete compact spaces along enumerations of
countable discrete subsets.

Ω and Σ are enumerated block by block (level 1, 2, ...). Inside level n, sign
vectors are ordered lexicographically with -1 before +1 and coordinate 0 most
significant; the points of Σ_n by index. Block n of Ω starts at 2^n - 2 and
block n of Σ at n(n-1)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from jnseq.construction import build_mu
from jnseq.errors import IntegrityError
from jnseq.measures import FiniteSignedMeasure, ProductPoint, SigmaPoint, SignVector, integrate

DEMO_COLUMNS = ["n", "f_name", "model_K", "model_L", "value_decimal", "value_num", "value_den"]


def _reverse_bits(x: int, width: int) -> int:
    return int(format(x, f"0{width}b")[::-1], 2) if width else 0


def omega_index(s: SignVector) -> int:
    n = s.level
    return (1 << n) - 2 + _reverse_bits(s.bits, n)


def omega_point(j: int) -> SignVector:
    if j < 0:
        raise ValueError("index must be nonnegative")
    n = (j + 2).bit_length() - 1
    return SignVector(n, _reverse_bits(j - ((1 << n) - 2), n))


def sigma_index(p: SigmaPoint) -> int:
    return p.level * (p.level - 1) // 2 + p.index


def sigma_point(j: int) -> SigmaPoint:
    if j < 0:
        raise ValueError("index must be nonnegative")
    n = (1 + math.isqrt(1 + 8 * j)) // 2
    while n * (n - 1) // 2 > j:
        n -= 1
    while (n + 1) * n // 2 <= j:
        n += 1
    return SigmaPoint(j - n * (n - 1) // 2, n)


@dataclass(frozen=True)
class ModelSpace:
    """A compact space with an injective enumeration of a discrete subset."""

    name: str
    point: Callable[[int], Fraction]
    note: str


def _harmonic(k: int) -> Fraction:
    return Fraction(1, k + 1)


def _cantor(k: int) -> Fraction:
    # ternary word 0^k 2 0 0 ...
    return Fraction(2, 3 ** (k + 1))


MODELS = {
    "omega_plus_one": ModelSpace(
        "omega_plus_one", _harmonic,
        "{0} ∪ {1/(k+1)}; each 1/(k+1) is isolated, 0 is the only limit point"),
    "unit_interval": ModelSpace(
        "unit_interval", _harmonic,
        "[0, 1] with the same sequence 1/(k+1), which is discrete in itself"),
    "cantor": ModelSpace(
        "cantor", _cantor,
        "middle-thirds Cantor set with the points 2/3^(k+1), isolated from each other"),
}

TEST_FUNCTIONS: dict[str, Callable[[Fraction, Fraction], Fraction]] = {
    "const1": lambda x, y: Fraction(1),
    "proj_x": lambda x, y: x,
    "proj_y": lambda x, y: y,
    "product_xy": lambda x, y: x * y,
    "poly": lambda x, y: (x + y) ** 2,
    "dist_to_zero": lambda x, y: min(x, y),
}


def get_model(name: str) -> ModelSpace:
    try:
        return MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODELS)}") from None


def get_function(name: str):
    try:
        return TEST_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; choose from {', '.join(TEST_FUNCTIONS)}") from None


def pushforward(nu: FiniteSignedMeasure, phi: Callable[[int], object],
                psi: Callable[[int], object]) -> FiniteSignedMeasure:
    """Move each atom (s, i) to (phi(omega_index(s)), psi(sigma_index(i))), keeping its weight."""
    atoms = {}
    for (s, sigma), w in nu.items():
        target = (phi(omega_index(s)), psi(sigma_index(sigma)))
        if target in atoms:
            raise IntegrityError(f"two atoms land on {target}; enumeration is not injective")
        atoms[target] = w
    return FiniteSignedMeasure(atoms)


def pushforward_mu(n: int, model_k: ModelSpace, model_l: ModelSpace) -> FiniteSignedMeasure:
    return pushforward(build_mu(n), model_k.point, model_l.point)


def pulled_back(f, model_k: ModelSpace, model_l: ModelSpace):
    """f(phi(.), psi(.)) as a function on points (s, i) of the discrete product."""
    def g(point: ProductPoint):
        s, sigma = point
        return f(model_k.point(omega_index(s)), model_l.point(sigma_index(sigma)))
    return g


def convergence_demo(model_k: str, model_l: str, f_name: str, n_max: int) -> list[tuple[int, Fraction]]:
    """[(n, integral of f against the pushed-forward mu_n)] for n = 1..n_max."""
    K, L, f = get_model(model_k), get_model(model_l), get_function(f_name)
    out = []
    for n in range(1, n_max + 1):
        rho = pushforward_mu(n, K, L)
        out.append((n, integrate(rho, lambda p: f(*p))))
    return out
