"""Acceptance suite: one test per acceptance criterion, numbered 1 to 7.

Run with ``pytest tests/test_acceptance.py -v``; each criterion reports a
single PASSED or FAILED line.
"""

import filecmp
import io
import os
import random
import statistics
import time
from fractions import Fraction

import pytest

from bagsearch import fixtures
from bagsearch.cli import run
from bagsearch.generator import GenParams, generate_repository
from bagsearch.grammar import distance, distance_between, iteration_bound
from bagsearch.matcher import baseline_match, match, opt_match
from bagsearch.repository import load_repository
from bagsearch.oracle import (EnumerationBudget, EnumerationBudgetExceeded, brute_match,
                              brute_rptrees, brute_score, brute_subsumes, enumerate_trees)
from bagsearch.rptree import is_rptree, top_k_rptrees
from bagsearch.scorer import opt_score, rho_max, score
from bagsearch.search import (TopKStats, build_indexes, exhaustive_top_k, grammar_keywords,
                              top_k)
from bagsearch.trees import parse_tree, tree_subsumes

from randgram import random_tree_pairs, sample

SCORE_TOL = 1e-12
BRUTE_TOL = 1e-9
MIN_PAIRS = 500
MAX_BOUND = 14
MATCH_MS = 100.0
SCORE_MS = 400.0
BUCKET = 100


@pytest.fixture(scope="module")
def corpus():
    repo = generate_repository(GenParams())
    return repo, build_indexes(repo)


def _own_queries(repo, n, seed, sizes=(2, 3, 4)):
    """Queries drawn from one grammar's keywords, so that they have matches."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        kws = grammar_keywords(repo[rng.choice(repo.ids)])
        size = rng.choice(sizes)
        if len(kws) >= size:
            out.append(rng.sample(kws, size))
    return out


def test_criterion_1_worked_examples():
    t0 = time.perf_counter()
    chain = fixtures.load("chain")
    disease = fixtures.load("disease")
    for algo in (match, opt_match, baseline_match):
        assert algo(chain, "s1 b") is True
        assert algo(chain, "s1 s2") is False
        assert algo(disease, "23andMe HapMap") is True
        assert algo(disease, "OMIM PubMed") is False
    assert distance_between(chain, "S", "C") == 2
    assert distance_between(chain, "S", "B") == 3
    assert distance(chain) == 4
    assert abs(score(chain, "b c") - 1 / 6) <= SCORE_TOL
    assert abs(opt_score(chain, "b c") - 1 / 6) <= SCORE_TOL
    assert rho_max(chain, exact=True) == Fraction(1, 3)
    assert time.perf_counter() - t0 < 1.0


def test_criterion_2_rptree_fidelity():
    g = fixtures.load("ranking")
    t2 = parse_tree(g, "(r1 (r3 s2) (r8 b3))")
    t7 = parse_tree(g, "(r1 (r1 (r3 s2) (r8 b3)) (r8 b3))")
    t8 = parse_tree(g, "(r1 (r2 (r3 s2) (r5 a2) (r5 a2) s1) (r8 b3))")
    assert abs(t2.rho - Fraction(1, 27)) <= SCORE_TOL and round(float(t2.rho), 3) == 0.037
    assert abs(t7.rho - Fraction(1, 243)) <= SCORE_TOL and round(float(t7.rho), 3) == 0.004
    assert abs(t8.rho - Fraction(1, 324)) <= SCORE_TOL and round(float(t8.rho), 3) == 0.003
    assert tree_subsumes(t2, t7)
    assert is_rptree(g, t8, t8.height)
    assert not is_rptree(g, t7, t7.height)
    keys = [t.key for t in top_k_rptrees(g, "s2 b3", 8)]
    assert t2.key in keys and t8.key in keys and t7.key not in keys


def test_criterion_3_algorithm_equivalence(corpus):
    rng = random.Random(20120827)
    checked = rp_checked = 0
    modes = ["nonrec", "linear", "any"]
    i = 0
    while checked < MIN_PAIRS:
        mode = modes[i % 3]
        i += 1
        n_kw = rng.choice([2, 3, 4])
        g, q = sample(rng, mode, n_kw, max_bound=MAX_BOUND)
        height = iteration_bound(g, n_kw)
        assert height <= MAX_BOUND
        budget = EnumerationBudget(height)
        try:
            bm = brute_match(g, q, budget)
            bs = brute_score(g, q, budget)
        except EnumerationBudgetExceeded:
            continue
        assert match(g, q) == opt_match(g, q) == baseline_match(g, q) == bm
        s = score(g, q)
        assert abs(s - bs) <= BRUTE_TOL
        assert abs(s - opt_score(g, q)) <= SCORE_TOL
        if mode != "any":
            try:
                expected = [t.key for t in brute_rptrees(g, q, 3, budget)]
            except EnumerationBudgetExceeded:
                expected = None
            if expected is not None:
                assert [t.key for t in top_k_rptrees(g, q, 3)] == expected
                assert [t.key for t in top_k_rptrees(g, q, 3, fast_path=False)] == expected
                rp_checked += 1
        checked += 1
    assert rp_checked >= MIN_PAIRS // 3

    repo, idx = corpus
    for q in _own_queries(repo, 30, 3):
        for k in (1, 5, 10):
            assert top_k(repo, q, k, idx) == exhaustive_top_k(repo, q, k)


def _all_trees(g, height, cap=3_000):
    try:
        trees = enumerate_trees(g, budget=EnumerationBudget(height, 20_000))
    except EnumerationBudgetExceeded:
        return None
    return trees if len(trees) <= cap else None


def test_criterion_4_recursion_properties():
    rng = random.Random(4)
    # (a) non-recursive: no tree strictly subsumes another
    done = 0
    while done < 60:
        g, _ = sample(rng, "nonrec", 1)
        trees = _all_trees(g, distance(g) + 1, cap=400)
        if not trees:
            continue
        for a in trees:
            for b in trees:
                if a is not b and a.paths != b.paths:
                    assert not tree_subsumes(a, b)
        done += 1
    # (b) linear recursion: a subsumer is at least as probable
    done = pairs = 0
    while done < 60:
        g, _ = sample(rng, "linear", 1)
        trees = _all_trees(g, min(distance(g) + 2, 6), cap=300)
        if not trees:
            continue
        for a in trees:
            for b in trees:
                if a is not b and tree_subsumes(a, b):
                    assert a.rho >= b.rho
                    pairs += 1
        done += 1
    assert pairs > 0
    # (c) general recursion breaks the ordering
    g = fixtures.load("counterexample")
    t = parse_tree(g, "(r1 (r2 (r5 a) (r7 b)) (r2 (r5 a) (r7 b)) (r3 s1))")
    t2 = parse_tree(g, "(r1 (r2 (r4 (r5 a) (r5 a)) (r6 (r7 b) (r7 b))) (r3 s1) (r3 s1))")
    assert abs(float(t.rho) - 4.55625e-6) <= BRUTE_TOL
    assert abs(float(t2.rho) - 1.1390625e-5) <= BRUTE_TOL
    assert round(float(t.rho), 6) == 0.000005 and round(float(t2.rho), 6) == 0.000011
    assert tree_subsumes(t, t2) and t.rho < t2.rho


def test_criterion_5_subsumption_kernel():
    rng = random.Random(55)
    positives = 0
    for a, b in random_tree_pairs(rng, 1000, max_paths=6):
        for x, y in ((a, b), (b, a)):
            got = tree_subsumes(x, y)
            assert got == brute_subsumes(x, y)
            if got:
                positives += 1
                assert x.height <= y.height
                if x.height == y.height:
                    assert x.label == y.label
    assert positives > 0


def _median_ms(fn, g, q, reps=3):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(g, q)
        times.append((time.perf_counter() - t0) * 1000)
    return statistics.median(times)


def test_criterion_6_performance_shape(corpus):
    repo, idx = corpus
    assert max(repo[g].size for g in repo.ids) >= 4000
    rng = random.Random(6)
    buckets = {}
    for gid in repo.ids:
        g = repo[gid]
        kws = grammar_keywords(g)
        q = rng.sample(kws, min(len(kws), rng.choice([2, 3])))
        row = {name: _median_ms(fn, g, q) for name, fn in
               (("match", match), ("opt_match", opt_match), ("baseline", baseline_match),
                ("score", score), ("opt_score", opt_score))}
        assert row["match"] < MATCH_MS and row["opt_match"] < MATCH_MS, (gid, row)
        assert row["score"] < SCORE_MS and row["opt_score"] < SCORE_MS, (gid, row)
        b = buckets.setdefault(g.size // BUCKET, {"match": [], "opt_match": [], "baseline": []})
        for name in b:
            b[name].append(row[name])
    for lo, b in sorted(buckets.items()):
        base = statistics.mean(b["baseline"])
        assert statistics.mean(b["match"]) < base, lo * BUCKET
        assert statistics.mean(b["opt_match"]) < base, lo * BUCKET

    saved = 0
    for q in _own_queries(repo, 30, 8):
        st = TopKStats()
        top_k(repo, q, 1, idx, stats=st)
        assert st.full_scores <= max(st.candidates, len(st.scored))
        saved += st.full_scores < st.candidates
    assert saved >= 1


def _cli(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    assert code == 0
    return out.getvalue()


def test_criterion_7_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    _cli("gen", str(a), "--n-grammars", "40", "--seed", "7")
    _cli("gen", str(b), "--n-grammars", "40", "--seed", "7")
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    assert mismatch == [] and errors == []

    manifest = str(a / "manifest.txt")
    kws = grammar_keywords(load_repository(manifest)["g0003"])[:2]
    query = " ".join(kws)
    outputs = []
    for threads in ("1", "4", "1"):
        _cli("index", "--repo", manifest, "--threads", threads, "--format", "structured",
             "--out", str(tmp_path / f"index{threads}.tsv"))
        outputs.append((
            _cli("search", query, "--repo", manifest, "--threads", threads,
                 "--format", "structured"),
            _cli("topk", query, "-k", "5", "--repo", manifest, "--threads", threads,
                 "--format", "structured"),
            _cli("bench", "--repo", manifest, "--threads", threads, "--algos", "opt_match")
            .splitlines()[0],
        ))
    assert outputs[0] == outputs[1] == outputs[2]
    assert outputs[0][1] and outputs[0][2]
    assert (tmp_path / "index1.tsv").read_bytes() == (tmp_path / "index4.tsv").read_bytes()
