from fractions import Fraction

import pytest

from bagsearch import fixtures
from bagsearch.grammar import parse_grammar
from bagsearch.oracle import (EnumerationBudget, EnumerationBudgetExceeded, brute_match,
                              brute_rptrees, brute_score_exact, enumerate_trees, is_rptree_brute)
from bagsearch.trees import parse_tree


def test_single_tree():
    g = parse_grammar("grammar one\nstart S\nprod r1: S -> s ;\n")
    trees = enumerate_trees(g, budget=EnumerationBudget(5))
    assert [t.key for t in trees] == ["(r1 s)"]


def test_ternary_height2():
    g = fixtures.load("ternary")
    rhos = {t.key: t.rho for t in enumerate_trees(g, budget=EnumerationBudget(2))}
    assert rhos["(r2 a)"] == Fraction(1, 2)
    assert rhos["(r1 (r2 a) (r2 a) (r2 a))"] == Fraction(1, 16)


def _count_chain(h):
    # trees of height <= h per symbol, following the seven productions
    B = lambda h: 1 if h >= 1 else 0
    C = lambda h: (1 if h >= 1 else 0) + B(h - 1)
    A = lambda h: B(h - 1) * C(h - 1) if h >= 1 else 0

    def S(h):
        return 0 if h < 1 else 2 + A(h - 1) * S(h - 1)
    return S(h)


@pytest.mark.parametrize("h", [1, 2, 3, 4, 5, 6])
def test_chain_counts(chain, h):
    assert len(enumerate_trees(chain, budget=EnumerationBudget(h))) == _count_chain(h)
    assert _count_chain(3) == 4


def test_budget_exceeded():
    g = fixtures.load("ternary")
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_trees(g, budget=EnumerationBudget(5, max_trees=1000))


def test_brute_references(chain):
    b = EnumerationBudget(8)
    assert brute_match(chain, "s1 b", b)
    assert not brute_match(chain, "s1 s2", b)
    assert brute_score_exact(chain, "b c", b) == Fraction(1, 6)


def test_ranking_empty_query(ranking):
    out = brute_rptrees(ranking, "", 50, EnumerationBudget(4))
    keys = {t.key for t in out}
    assert "(r1 (r3 s2) (r8 b3))" in keys
    assert "(r1 (r2 (r3 s2) (r5 a2) (r5 a2) s1) (r8 b3))" in keys
    assert "(r1 (r1 (r3 s2) (r8 b3)) (r8 b3))" not in keys


def test_is_rptree_brute(ranking):
    b = EnumerationBudget(4)
    t7 = parse_tree(ranking, "(r1 (r1 (r3 s2) (r8 b3)) (r8 b3))")
    t8 = parse_tree(ranking, "(r1 (r2 (r5 a2) (r5 a2) (r3 s2) s1) (r8 b3))")
    assert not is_rptree_brute(ranking, t7, b)
    assert is_rptree_brute(ranking, t8, b)
