import os
import random
from fractions import Fraction

import pytest

from bagsearch import fixtures
from bagsearch.grammar import iteration_bound, parse_grammar
from bagsearch.oracle import EnumerationBudget, EnumerationBudgetExceeded, brute_score
from bagsearch.scorer import (opt_score, read_rho_max_sidecar, rho_max, score, score_exact,
                              write_rho_max_sidecar)

from randgram import sample


def test_chain_score(chain):
    assert abs(score(chain, "b c") - 1 / 6) <= 1e-12
    assert abs(opt_score(chain, "b c") - 1 / 6) <= 1e-12
    assert score_exact(chain, "b c") == Fraction(1, 6)


def test_rho_max_values(chain, ranking):
    assert rho_max(chain, exact=True) == Fraction(1, 3)
    assert rho_max(ranking, exact=True) == Fraction(1, 3)
    g = parse_grammar("grammar one\nstart S\nprod r1: S -> s ;\n")
    assert rho_max(g) == 1.0


@pytest.mark.parametrize("name", sorted(fixtures.TEXTS))
def test_empty_query_scores_one(name):
    g = fixtures.load(name)
    assert score(g, "") == pytest.approx(1.0, abs=1e-12)
    assert opt_score(g, "") == pytest.approx(1.0, abs=1e-12)


def test_non_matching_scores_zero(chain):
    assert score(chain, "s1 s2") == 0.0
    assert opt_score(chain, "s1 s2") == 0.0
    assert score(chain, "nope") == 0.0


@pytest.mark.parametrize("mode", ["nonrec", "linear", "any"])
def test_random_against_brute(mode):
    rng = random.Random(len(mode))
    for _ in range(40):
        g, q = sample(rng, mode, rng.choice([1, 2, 3]), max_bound=10)
        s = score(g, q)
        assert abs(s - opt_score(g, q)) <= 1e-12
        try:
            b = brute_score(g, q, EnumerationBudget(iteration_bound(g, len(q)), 100_000))
        except EnumerationBudgetExceeded:
            continue
        assert abs(s - b) <= 1e-9


def test_sidecar_round_trip(tmp_path, chain):
    path = tmp_path / "chain.bg"
    path.write_text(fixtures.CHAIN)
    assert write_rho_max_sidecar(chain, str(path)) == pytest.approx(1 / 3)
    fresh = fixtures.load("chain")
    assert read_rho_max_sidecar(fresh, str(path)) == pytest.approx(1 / 3)
    other = fixtures.load("ranking")
    assert read_rho_max_sidecar(other, str(path)) is None
    os.remove(str(path) + ".rhomax")
    assert read_rho_max_sidecar(fresh, str(path)) is None
