import random

import pytest

from bagsearch import fixtures
from bagsearch.generator import GenParams, generate_repository
from bagsearch.matcher import (MAX_QUERY, KeywordSetFamily, Query, QueryTooLarge, baseline_match,
                               binarize, match, match_trace, opt_match, opt_match_families)
from bagsearch.oracle import EnumerationBudget, EnumerationBudgetExceeded, brute_match
from bagsearch.grammar import iteration_bound
from bagsearch.search import grammar_keywords

from randgram import sample

ALGOS = [match, opt_match, baseline_match, lambda g, q: match(g, q, dominate=False)]


@pytest.mark.parametrize("algo", ALGOS)
def test_chain(chain, algo):
    assert algo(chain, "s1 b") is True
    assert algo(chain, "s1 s2") is False


@pytest.mark.parametrize("algo", ALGOS)
def test_disease(disease, algo):
    assert algo(disease, "23andMe HapMap") is True
    assert algo(disease, "OMIM PubMed") is False


@pytest.mark.parametrize("algo", ALGOS)
def test_disease_source_form(algo):
    g = fixtures.load("disease-modules")
    assert algo(g, "23andMe HapMap") is True
    assert algo(g, "OMIM PubMed") is False


@pytest.mark.parametrize("algo", ALGOS)
@pytest.mark.parametrize("name", sorted(fixtures.TEXTS))
def test_empty_query_always_matches(name, algo):
    assert algo(fixtures.load(name), "") is True


@pytest.mark.parametrize("algo", ALGOS)
def test_missing_keyword(chain, algo):
    assert algo(chain, "s1 zzz") is False


def test_chain_families(chain):
    found, fam = opt_match_families(chain, "b c")
    names = {chain.ix.names[k]: v for k, v in fam.items()}
    assert found
    # bit 0 is b, bit 1 is c
    assert names["C"] == {0b01, 0b10}
    assert names["A"] == {0b11}
    assert "S" not in names


def test_match_trace_reports_iterations(chain):
    tr = match_trace(chain, "s1 b")
    assert tr.matched and tr.early_exit
    assert tr.iterations <= iteration_bound(chain, 2)


def test_binarize_chain(ranking):
    b = binarize(ranking)
    assert all(len(body) <= 2 for _, body in b.rules)
    fresh = [n for n in b.names if n.startswith("r2#")]
    assert fresh == ["r2#1", "r2#2"]
    assert sum(1 for h, _ in b.rules if b.names[h] in ("S", "r2#1", "r2#2")) == 5


def test_family_domination():
    f = KeywordSetFamily()
    f.add_element("A", 0b11)
    assert f.add_element("A", 0b01) is False
    assert f.get("A") == {0b11}
    g = KeywordSetFamily()
    g.add_element("A", 0b01)
    assert g.add_element("A", 0b11) is True
    assert g.get("A") == {0b11}
    h = KeywordSetFamily()
    assert h.add_element("A", 0) is True
    assert h.get("A") == {0}


def test_query_limits():
    Query([f"k{i}" for i in range(MAX_QUERY)])
    with pytest.raises(QueryTooLarge):
        Query([f"k{i}" for i in range(MAX_QUERY + 1)])
    assert Query.parse("a b a").keywords == ("a", "b")


@pytest.mark.parametrize("mode", ["nonrec", "linear", "any"])
def test_random_against_brute(mode):
    rng = random.Random(sum(map(ord, mode)))
    for _ in range(40):
        g, q = sample(rng, mode, rng.choice([1, 2, 3]), max_bound=10)
        expected = [a(g, q) for a in ALGOS]
        assert len(set(expected)) == 1
        h = iteration_bound(g, len(q))
        try:
            assert brute_match(g, q, EnumerationBudget(h, 100_000)) == expected[0]
        except EnumerationBudgetExceeded:
            pass


def test_generated_corpus_agreement():
    repo = generate_repository(GenParams(n_grammars=60))
    rng = random.Random(5)
    for gid in repo.ids:
        g = repo[gid]
        pool = grammar_keywords(g) + ["t00k00", "t19k19"]
        q = rng.sample(pool, rng.randint(2, 4))
        assert match(g, q) == opt_match(g, q) == baseline_match(g, q)
