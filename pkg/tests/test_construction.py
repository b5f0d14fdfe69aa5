import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jnseq import construction as cn
from jnseq.concentration import delta_probability
from jnseq.errors import DomainError, ResourceLimitError, SpecError
from jnseq.measures import ProductPoint, SigmaPoint, SignVector, total_variation
from jnseq.numerics import Bound
from oracles import all_sign_vectors, in_delta, rectangle_value_by_atoms, subsets

E12 = Fraction(1, 12)
GRID = [Fraction(1, 12), Fraction(1, 16), Fraction(1, 24), Fraction(1, 48)]


def sv(text):
    return SignVector.parse(text)


def test_build_mu_level_one():
    mu = cn.build_mu(1)
    assert mu.atoms == {ProductPoint(sv("+"), SigmaPoint(0, 1)): Fraction(1, 2),
                        ProductPoint(sv("-"), SigmaPoint(0, 1)): Fraction(-1, 2)}


def test_build_mu_level_two():
    mu = cn.build_mu(2)
    assert len(mu) == 8
    assert {abs(w) for _, w in mu.items()} == {Fraction(1, 8)}
    assert total_variation(mu) == 1


def test_build_mu_cap():
    with pytest.raises(ResourceLimitError):
        cn.build_mu(17)
    with pytest.raises(DomainError):
        cn.build_mu(0)


def test_supports_have_disjoint_projections():
    supports = [cn.build_mu(n).support for n in range(1, 7)]
    for (i, s), (j, t) in itertools.combinations(enumerate(supports), 2):
        assert not {p.first for p in s} & {p.first for p in t}
        assert not {p.second for p in s} & {p.second for p in t}


def spec(a, b):
    return cn.RectangleSpec(a, b)


def test_resolve_examples():
    r = cn.resolve(spec(cn.AllOfOmegaN(), cn.AllOfSigmaN()), 3)
    assert len(r.members()) == 8 and r.b == (0, 1, 2)
    r = cn.resolve(spec(cn.OptimalForB(), cn.ExplicitB((0,))), 1)
    assert r.members() == [sv("+")]
    r = cn.resolve(spec(cn.DeltaSet(E12), cn.AllOfSigmaN()), 2)
    assert sorted(map(str, r.members())) == ["++", "--"]


def test_resolve_filters_explicit():
    s = spec(cn.ExplicitA((sv("+-"), sv("+"), sv("++-"))), cn.ExplicitB((0, 1, 5)))
    r = cn.resolve(s, 2)
    assert r.members() == [sv("+-")] and r.b == (0, 1)


def test_resolve_arith_and_errors():
    assert cn.resolve(spec(cn.AllOfOmegaN(), cn.ArithmeticB(1, 3)), 8).b == (1, 4, 7)
    with pytest.raises(DomainError):
        cn.resolve(spec(cn.DeltaSet(Fraction(1, 11)), cn.AllOfSigmaN()), 3)
    with pytest.raises(ResourceLimitError):
        cn.resolve(spec(cn.RandomA(Fraction(1, 2), 1), cn.AllOfSigmaN()), 30)


def test_random_resolution_is_deterministic():
    s = spec(cn.RandomA(Fraction(1, 2), 7), cn.RandomB(Fraction(1, 2), 7))
    r1, r2 = cn.resolve(s, 10), cn.resolve(s, 10)
    assert r1.b == r2.b and np.array_equal(r1.a.mask, r2.a.mask)
    other = cn.resolve(spec(cn.RandomA(Fraction(1, 2), 8), cn.AllOfSigmaN()), 10)
    assert not np.array_equal(other.a.mask, r1.a.mask)


def test_random_resolution_frozen_values():
    # Pins the PCG64 stream layout so output files stay reproducible.
    r = cn.resolve(spec(cn.RandomA(Fraction(1, 2), 7), cn.RandomB(Fraction(1, 2), 7)), 10)
    assert (r.b, r.size_a(), cn.rectangle_value(r)) == ((1, 3, 4, 7, 8), 521, Fraction(41, 10240))


def test_spec_json_round_trip():
    s = spec(cn.RandomA(Fraction(1, 3), 5), cn.ArithmeticB(0, 2))
    assert cn.RectangleSpec.from_json(s.to_json()) == s
    for a in (cn.ExplicitA((sv("+-"),)), cn.AllOfOmegaN(), cn.OptimalForB(),
              cn.MajorityPositiveForB(), cn.DeltaSet(E12)):
        for b in (cn.ExplicitB((0, 2)), cn.AllOfSigmaN(), cn.RandomB(Fraction(1, 2), 3)):
            assert cn.RectangleSpec.from_json(spec(a, b).to_json()) == spec(a, b)


@pytest.mark.parametrize("obj", [
    {"A": {"kind": "nope"}, "B": {"kind": "all"}},
    {"A": {"kind": "all"}},
    {"A": {"kind": "random", "p": "3/2", "seed": 1}, "B": {"kind": "all"}},
    {"A": {"kind": "delta", "eps": "0.1"}, "B": {"kind": "all"}},
    {"A": {"kind": "all"}, "B": {"kind": "arith", "start": 0, "step": 0}},
])
def test_spec_parse_errors(obj):
    with pytest.raises(SpecError, match="line 4"):
        cn.RectangleSpec.from_json(obj, line=4)


def test_evaluate_rectangle_examples():
    n = 3
    assert cn.evaluate_rectangle(n, all_sign_vectors(n), [0, 2]) == 0
    assert cn.evaluate_rectangle(1, ["+"], [0]) == Fraction(1, 2)
    assert cn.evaluate_rectangle(2, ["++", "+-"], [0, 1]) == Fraction(1, 4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_evaluate_rectangle_matches_atoms_exhaustive(n):
    mu = cn.build_mu(n)
    vectors = all_sign_vectors(n)
    for a in subsets(vectors):
        for b in subsets(range(n)):
            assert cn.evaluate_rectangle(n, a, b) == rectangle_value_by_atoms(n, a, b, mu)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_set_representations_agree(n):
    for s in cn.random_specs(40, n):
        r = cn.resolve(s, n)
        explicit = cn.Rectangle.from_sets(n, r.members(), r.b)
        assert explicit.histogram() == r.histogram()
        assert cn.rectangle_value(explicit) == rectangle_value_by_atoms(n, r.members(), r.b)


def test_structured_sets_match_definitions():
    n = 6
    for b in [(), (0,), (1, 3), (0, 2, 3, 5), tuple(range(6))]:
        sb = cn.ExplicitB(b)
        opt = cn.resolve(spec(cn.OptimalForB(), sb), n).members()
        maj = cn.resolve(spec(cn.MajorityPositiveForB(), sb), n).members()
        delta = cn.resolve(spec(cn.DeltaSet(E12), sb), n).members()
        vectors = all_sign_vectors(n)
        assert set(opt) == {s for s in vectors if sum(s[i] for i in b) > 0}
        assert set(maj) == {s for s in vectors if sum(s[i] for i in b) >= 0}
        assert set(delta) == {s for s in vectors if in_delta(s, b, E12)}


def test_dagger_bound():
    assert cn.dagger_bound(5, 32, 5) == 1
    assert cn.dagger_bound(4, 8, 2) == Fraction(1, 4)
    assert cn.dagger_bound(4, 0, 3) == 0
    with pytest.raises(DomainError):
        cn.dagger_bound(3, 9, 1)
    with pytest.raises(DomainError):
        cn.dagger_bound(3, 1, 4)


def test_remark_bound_branches():
    assert cn.remark_bound(100, 3, E12) == Bound(Fraction(3, 100))
    assert cn.remark_bound(7, 0, E12) == Bound(Fraction(0))
    cut = 2 * 12 ** 4
    at = cn.remark_bound(cut, cut, E12)
    assert at.has_radical and at.rational == E12 and at.sqrt_m == cut
    assert not cn.remark_bound(cut, cut - 1, E12).has_radical
    with pytest.raises(DomainError):
        cn.remark_bound(10, 2, Fraction(1, 5))


def test_remark_bound_second_branch_dominates_worst_rectangle():
    n = 2 * 12 ** 4
    r = cn.resolve(spec(cn.OptimalForB(), cn.AllOfSigmaN()), n)
    value = cn.rectangle_value(r)
    assert cn.remark_bound(n, n, E12).admits(value)
    assert Bound(Fraction(1, 6)).admits(value, strict=True)


def test_uniform_threshold():
    assert cn.uniform_threshold(E12) == 248832
    assert cn.uniform_threshold(Fraction(1, 12) - Fraction(1, 10 ** 6)) > 248832
    assert cn.uniform_threshold(Fraction(1, 13)) == 13 ** 5
    with pytest.raises(DomainError):
        cn.uniform_threshold(Fraction(1, 2))


def test_decompose_examples():
    full = cn.decompose_estimate(2, all_sign_vectors(2), [0, 1], E12)
    assert full.value == 0 and full.t1 + full.t2 >= 0
    assert all(full.reports[k].holds for k in ("a", "b", "c"))
    one = cn.decompose_estimate(1, ["+"], [0], E12)
    assert (one.t1, one.t2, one.p_delta) == (Fraction(1, 2), 0, 1)
    assert one.reports["b"].holds and "d" not in one.reports


def test_decompose_empty_b_is_flagged():
    tr = cn.decompose_estimate(3, ["+++"], [], E12)
    assert tr.degenerate and tr.t1 == tr.t2 == 0 and tr.all_hold


def test_decompose_estimate_d_applies_for_large_b():
    n = 600
    for a in (cn.OptimalForB(), cn.DeltaSet(E12), cn.AllOfOmegaN()):
        tr = cn.decompose_rectangle(cn.resolve(spec(a, cn.AllOfSigmaN()), n), E12)
        assert "d" in tr.reports and tr.all_hold


def test_decompose_matches_literal_split():
    n = 4
    mu = cn.build_mu(n)
    rnd = random.Random(3)
    vectors = all_sign_vectors(n)
    for _ in range(200):
        a = [s for s in vectors if rnd.random() < 0.5]
        b = [i for i in range(n) if rnd.random() < 0.6] or [0]
        eps = rnd.choice(GRID)
        tr = cn.decompose_estimate(n, a, b, eps)
        inside = [s for s in a if in_delta(s, b, eps)]
        outside = [s for s in a if not in_delta(s, b, eps)]
        assert tr.t1 == abs(rectangle_value_by_atoms(n, inside, b, mu))
        assert tr.t2 == abs(rectangle_value_by_atoms(n, outside, b, mu))
        assert tr.p_delta == delta_probability(n, len(b), eps).value


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sweep_agrees_with_scalar_path(n):
    summary = cn.sweep_all_rectangles(n, GRID)
    assert summary.ok and summary.rectangles == 2 ** (2 ** n) * 2 ** n
    for a in subsets(all_sign_vectors(n)):
        for b in subsets(range(n)):
            r = cn.Rectangle.from_sets(n, a, b)
            for rep in cn.rectangle_reports(r, GRID):
                assert rep.holds, rep


def test_sweep_detects_a_broken_kernel(monkeypatch):
    monkeypatch.setattr(cn, "plus_counts", lambda n, b: np.zeros(1 << n, dtype=np.uint8) + len(b))
    assert not cn.sweep_all_rectangles(2).ok


def test_sweep_cap():
    with pytest.raises(ResourceLimitError):
        cn.sweep_all_rectangles(5)


@given(st.integers(1, 10), st.integers(0, 2 ** 32), st.sampled_from(GRID))
@settings(max_examples=80, deadline=None)
def test_rectangle_properties(n, seed, eps):
    s = cn.random_specs(1, seed)[0]
    r = cn.resolve(s, n)
    value = cn.rectangle_value(r)
    neg = cn.Rectangle.from_sets(n, [-v for v in r.members()], r.b)
    assert cn.rectangle_value(neg) == -value
    assert abs(value) <= cn.dagger_bound(n, r.size_a(), r.m)
    assert cn.remark_bound(n, r.m, eps).admits(abs(value))
    assert cn.decompose_rectangle(r, eps).all_hold
    best = cn.rectangle_value(cn.resolve(cn.RectangleSpec(cn.OptimalForB(), cn.ExplicitB(r.b)), n))
    assert value <= best


@pytest.mark.parametrize("n", [2, 3, 4])
def test_optimal_a_beats_every_a(n):
    vectors = all_sign_vectors(n)
    for b in subsets(range(n)):
        best = max(cn.evaluate_rectangle(n, a, b) for a in subsets(vectors))
        opt = cn.resolve(cn.RectangleSpec(cn.OptimalForB(), cn.ExplicitB(b)), n)
        maj = cn.resolve(cn.RectangleSpec(cn.MajorityPositiveForB(), cn.ExplicitB(b)), n)
        assert cn.rectangle_value(opt) == cn.rectangle_value(maj) == best


def test_adding_positive_vector_does_not_decrease():
    n, b = 5, (0, 1, 3)
    rnd = random.Random(11)
    vectors = all_sign_vectors(n)
    for _ in range(100):
        a = [s for s in vectors if rnd.random() < 0.3]
        gainers = [s for s in vectors if s not in a and sum(s[i] for i in b) > 0]
        if gainers:
            s = rnd.choice(gainers)
            assert cn.evaluate_rectangle(n, a + [s], b) >= cn.evaluate_rectangle(n, a, b)
