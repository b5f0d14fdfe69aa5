import logging
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jnseq import concentration as c
from jnseq.errors import DomainError
from oracles import all_sign_vectors, in_delta, subsets, tail_by_enumeration

GRID = [Fraction(1, 12), Fraction(1, 16), Fraction(1, 24), Fraction(1, 48)]


def test_point_probability():
    assert c.point_probability(2, 1) == Fraction(1, 2)
    assert c.point_probability(7, 0) == Fraction(1, 128)
    assert c.point_probability(3, 4) == 0


@pytest.mark.parametrize("m", [1, 2, 13, 64])
def test_point_probabilities_sum_to_one(m):
    assert sum(c.point_probability(m, k) for k in range(m + 1)) == 1


def test_tail_examples():
    assert c.tail_probability(4, Fraction(1, 2)) == Fraction(5, 8)
    assert c.tail_probability(2, Fraction(1, 12)) == Fraction(1, 2)
    assert c.tail_probability(9, Fraction(3, 2)) == 0
    assert c.tail_probability(9, Fraction(0)) == 1


@pytest.mark.parametrize("m", range(1, 11))
@pytest.mark.parametrize("eps", GRID + [Fraction(1, 3), Fraction(1, 2), Fraction(1)])
def test_tail_matches_enumeration(m, eps):
    assert c.tail_probability(m, eps) == tail_by_enumeration(m, eps)


@given(st.integers(1, 300), st.fractions(0, 2, max_denominator=100), st.fractions(0, 2, max_denominator=100))
@settings(max_examples=60)
def test_tail_monotone_and_complement(m, e1, e2):
    lo, hi = sorted((e1, e2))
    assert c.tail_probability(m, hi) <= c.tail_probability(m, lo)
    assert c.tail_probability(m, lo) + c.band_probability(m, lo) == 1


def test_delta_probability_examples():
    assert c.delta_probability(5, 5, Fraction(1, 12)).value == c.tail_probability(5, Fraction(1, 12))
    assert c.delta_probability(10, 2, Fraction(1, 12)) == (Fraction(1, 2), False)
    assert c.delta_probability(3, 0, Fraction(1, 12)) == (Fraction(1), True)
    with pytest.raises(DomainError):
        c.delta_probability(3, 4, Fraction(1, 12))


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("eps", GRID[:3])
def test_delta_probability_by_counting(n, eps):
    vectors = all_sign_vectors(n)
    for b in subsets(range(n)):
        hits = sum(1 for s in vectors if in_delta(s, b, eps))
        assert c.delta_probability(n, len(b), eps).value == Fraction(hits, 2 ** n)


def test_check_bollobas_examples():
    r = c.check_bollobas(576, Fraction(1, 12))
    assert r.holds and r.kind == "bollobas"
    assert r.lhs == c.tail_probability(576, Fraction(1, 12))
    assert c.check_bollobas(577, Fraction(1, 12)).holds
    with pytest.raises(DomainError, match="48/eps"):
        c.check_bollobas(500, Fraction(1, 12))
    with pytest.raises(DomainError, match="1/12"):
        c.check_bollobas(5000, Fraction(1, 10))


def test_check_bollobas_logs_failure(monkeypatch, caplog):
    monkeypatch.setattr(c, "tail_probability", lambda m, eps: Fraction(1))
    with caplog.at_level(logging.ERROR):
        assert not c.check_bollobas(576, Fraction(1, 12)).holds
    assert "FAILED" in caplog.text


def test_grid_shape():
    pts = c.bollobas_grid([Fraction(1, 12)])
    ms = [m for m, _ in pts]
    assert ms[0] == 576 and 776 in ms and 777 not in ms and ms[-2:] == [1000, 2000]
    assert len(pts) == 203
