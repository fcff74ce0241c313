import random
from fractions import Fraction

import pytest

from bagsearch import fixtures
from bagsearch.grammar import iteration_bound, parse_grammar
from bagsearch.oracle import (EnumerationBudget, EnumerationBudgetExceeded, brute_rptrees,
                              enumerate_trees)
from bagsearch.rptree import (default_capacity, is_rptree, top_k_rptrees,
                              top_k_trees_nonrecursive)
from bagsearch.scorer import rho_max
from bagsearch.trees import parse_tree

from randgram import sample

T2 = "(r1 (r3 s2) (r8 b3))"
T7 = "(r1 (r1 (r3 s2) (r8 b3)) (r8 b3))"
T8 = "(r1 (r2 (r3 s2) (r5 a2) (r5 a2) s1) (r8 b3))"


def test_ranking_ranking(ranking):
    out = top_k_rptrees(ranking, "s2 b3", 8)
    keys = [t.key for t in out]
    assert T2 in keys and T8 in keys and T7 not in keys
    assert keys[0] == T2 and out[0].rho == Fraction(1, 27)
    assert out.heuristic and not out.partial
    assert [t.rho for t in out] == sorted((t.rho for t in out), reverse=True)


def test_ranking_membership(ranking):
    t7, t8 = parse_tree(ranking, T7), parse_tree(ranking, T8)
    assert not is_rptree(ranking, t7, t7.height)
    assert is_rptree(ranking, t8, t8.height)


def test_height_one_tree_is_representative(ranking):
    t = parse_tree(ranking, "(r3 s2)")
    assert is_rptree(ranking, t, 5)


def test_single_production():
    g = parse_grammar("grammar one\nstart S\nprod r1: S -> s ;\n")
    out = top_k_rptrees(g, "s", 1)
    assert [t.key for t in out] == ["(r1 s)"] and out[0].rho == 1


def test_bad_k(chain):
    with pytest.raises(ValueError):
        top_k_rptrees(chain, "b", 0)


def test_nonrecursive_requires_nonrecursive(chain):
    with pytest.raises(ValueError):
        top_k_trees_nonrecursive(chain, "b", 1)


def test_default_capacity():
    assert default_capacity(1) == 16
    assert default_capacity(10) == 40


def test_no_match_is_empty(chain):
    assert list(top_k_rptrees(chain, "s1 s2", 3)) == []
    assert list(top_k_rptrees(chain, "nope", 3)) == []


def test_nonrecursive_empty_query_is_most_probable_tree():
    rng = random.Random(4)
    for _ in range(20):
        g, _ = sample(rng, "nonrec", 1)
        best = top_k_trees_nonrecursive(g, "", 1)
        assert best[0].rho == rho_max(g, exact=True)


def test_nonrecursive_paths_agree_with_enumeration():
    rng = random.Random(9)
    for _ in range(40):
        g, q = sample(rng, "nonrec", rng.choice([1, 2]))
        fast = top_k_trees_nonrecursive(g, q, 4)
        slow = top_k_rptrees(g, q, 4, fast_path=False)
        assert [t.key for t in fast] == [t.key for t in slow]
        trees = enumerate_trees(g, budget=EnumerationBudget(iteration_bound(g, len(q))))
        ranked = sorted((t for t in trees if all(t.leaves.get(k) for k in q)),
                        key=lambda t: (-t.rho, t.key))
        assert [t.rho for t in fast] == [t.rho for t in ranked[:4]]


@pytest.mark.parametrize("mode", ["nonrec", "linear"])
def test_against_oracle(mode):
    rng = random.Random(len(mode) * 17)
    checked = 0
    for _ in range(40):
        g, q = sample(rng, mode, rng.choice([1, 2, 3]), max_bound=10)
        budget = EnumerationBudget(iteration_bound(g, len(q)), 50_000)
        try:
            expected = brute_rptrees(g, q, 3, budget)
        except EnumerationBudgetExceeded:
            continue
        for fast in (True, False):
            got = top_k_rptrees(g, q, 3, fast_path=fast)
            assert [t.key for t in got] == [t.key for t in expected]
        checked += 1
    assert checked >= 20


def test_subtrees_of_rptrees_are_representative():
    rng = random.Random(31)
    for _ in range(15):
        g, q = sample(rng, "linear", 2, max_bound=10)
        for t in top_k_rptrees(g, q, 2):
            for sub in t.subtrees():
                if sub.label is None:
                    continue
                try:
                    assert is_rptree(g, sub, sub.height, max_trees=20_000)
                except EnumerationBudgetExceeded:
                    pass


def test_general_recursion_is_flagged():
    g = fixtures.load("counterexample")
    out = top_k_rptrees(g, "a b", 2)
    assert out.heuristic
