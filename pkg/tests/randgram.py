"""Random small grammars for differential tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional

from bagsearch.grammar import (Grammar, Production, distance, recursion_class,
                               validate_proper, NON_RECURSIVE, LINEAR_RECURSIVE)


def random_grammar(rng: random.Random, mode: str = "any", n_vars: Optional[int] = None,
                   n_terms: Optional[int] = None, max_body: int = 3,
                   weighted: bool = True, epsilon: bool = True) -> Grammar:
    """mode: 'nonrec' (acyclic), 'linear', or 'any'."""
    nv = n_vars or rng.randint(1, 4)
    nt = n_terms or rng.randint(2, 5)
    vars_ = [f"V{i}" for i in range(nv)]
    terms = [f"t{i}" for i in range(nt)]
    bodies: List[List[List[str]]] = []
    for i in range(nv):
        below = vars_[i + 1:]
        n_prod = rng.randint(1, 3)
        prods = []
        for j in range(n_prod):
            pool = terms + below if (j == 0 or mode == "nonrec") else terms + vars_
            lo = 0 if epsilon else 1
            body = [rng.choice(pool) for _ in range(rng.randint(lo, max_body))]
            prods.append(body)
        bodies.append(prods)
    for i in range(1, nv):
        parent = rng.randrange(0, i)
        bodies[parent][0].append(vars_[i])
    used = {s for prods in bodies for b in prods for s in b}
    for t in terms:
        if t not in used:
            i = rng.randrange(nv)
            bodies[i][rng.randrange(len(bodies[i]))].append(t)
    productions = []
    n = 0
    for i, prods in enumerate(bodies):
        weights = [rng.randint(1, 4) if weighted else 1 for _ in prods]
        total = sum(weights)
        for body, w in zip(prods, weights):
            n += 1
            productions.append(Production(f"r{n}", vars_[i], tuple(body), Fraction(w, total), True))
    g = Grammar(f"rand{rng.random():.6f}", vars_[0], tuple(productions))
    return g


def sample(rng: random.Random, mode: str, n_keywords: int, max_bound: int = 14, tries: int = 20000,
           **kw):
    """A proper grammar in the requested recursion mode plus a query whose
    iteration bound d(G)(|Q|+1)+|Q| stays within ``max_bound``."""
    for _ in range(tries):
        g = random_grammar(rng, mode, **kw)
        if validate_proper(g):
            continue
        cls = recursion_class(g)
        if mode == "nonrec" and cls != NON_RECURSIVE:
            continue
        if mode == "linear" and cls != LINEAR_RECURSIVE:
            continue
        terms = list(g.terminals)
        if len(terms) < n_keywords:
            continue
        d = distance(g)
        if max(d * (n_keywords + 1) + n_keywords, d + 1) > max_bound:
            continue
        q = rng.sample(terms, n_keywords)
        return g, q
    raise RuntimeError("no grammar satisfied the constraints")


def random_tree_pairs(rng: random.Random, n: int, max_paths: int = 6, height: int = 4):
    """``n`` pairs of same-head parse trees with at most ``max_paths`` paths each,
    drawn from enumerations of random recursive grammars so that subsumption
    holds for a fair share of pairs."""
    from bagsearch.oracle import EnumerationBudget, EnumerationBudgetExceeded, enumerate_trees

    pairs = []
    while len(pairs) < n:
        g = random_grammar(rng, rng.choice(["linear", "any"]), epsilon=rng.random() < 0.3)
        if validate_proper(g):
            continue
        try:
            trees = enumerate_trees(g, budget=EnumerationBudget(height, 5_000))
        except EnumerationBudgetExceeded:
            continue
        trees = [t for t in trees if len(t.paths) <= max_paths]
        if len(trees) < 2:
            continue
        trees.sort(key=lambda t: t.key)
        for _ in range(min(10, n - len(pairs))):
            a, b = rng.sample(trees, 2)
            if len(a.paths) > len(b.paths):
                a, b = b, a
            pairs.append((a, b))
    return pairs
