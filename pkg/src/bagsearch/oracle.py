"""Brute-force references: bounded tree enumeration and exhaustive checks.

Nothing here calls the matcher, scorer, or subsumption kernels; only the
ParseTree data type is shared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .grammar import Grammar
from .trees import ParseTree


class EnumerationBudgetExceeded(RuntimeError):
    """Enumeration would exceed the configured tree budget."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_height: int
    max_trees: int = 200_000


class _Enumerator:
    def __init__(self, g: Grammar, budget: EnumerationBudget):
        self.g = g
        self.budget = budget
        self.count = 0
        self.memo: Dict[Tuple[str, int], List[ParseTree]] = {}
        self.heads = {p.head for p in g.productions}
        self.leaves: Dict[str, ParseTree] = {}

    def trees(self, sym: str, h: int) -> List[ParseTree]:
        """All trees of ``sym`` with height <= h (a terminal is its own leaf)."""
        if sym not in self.heads:
            leaf = self.leaves.get(sym)
            if leaf is None:
                leaf = self.leaves[sym] = ParseTree.leaf(sym)
            return [leaf]
        if h <= 0:
            return []
        key = (sym, h)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out: List[ParseTree] = []
        for p in self.g.productions:
            if p.head != sym:
                continue
            groups: Dict[str, int] = {}
            for s in p.body:
                groups[s] = groups.get(s, 0) + 1
            subs = [(self.trees(s, h - 1), n) for s, n in groups.items()]
            total = 1
            for sub, n in subs:
                total *= comb(len(sub) + n - 1, n)
            if self.count + total > self.budget.max_trees:
                raise EnumerationBudgetExceeded(
                    f"more than {self.budget.max_trees} trees below height {self.budget.max_height}")
            options = [list(combinations_with_replacement(sub, n)) for sub, n in subs]
            for combo in product(*options):
                kids = [t for part in combo for t in part]
                rho = p.prob
                for k in kids:
                    rho *= k.rho
                out.append(ParseTree(p.label, p.head, kids, rho))
                self.count += 1
                if self.count > self.budget.max_trees:
                    raise EnumerationBudgetExceeded(
                        f"more than {self.budget.max_trees} trees below height {self.budget.max_height}")
        self.memo[key] = out
        return out


def enumerate_trees(g: Grammar, root: Optional[str] = None,
                    budget: EnumerationBudget = EnumerationBudget(4)) -> List[ParseTree]:
    """Every parse tree rooted at a production of ``root`` up to the height budget."""
    root = g.start if root is None else root
    return list(_Enumerator(g, budget).trees(root, budget.max_height))


def _terminals_of(g: Grammar, q) -> Optional[List[str]]:
    kws = q.split() if isinstance(q, str) else list(getattr(q, "keywords", q))
    heads = {p.head for p in g.productions}
    body_syms = {s for p in g.productions for s in p.body}
    terms = []
    for k in kws:
        if k in body_syms and k not in heads:
            terms.append(k)
        elif "kw:" + k in body_syms and "kw:" + k not in heads:
            terms.append("kw:" + k)
        else:
            return None
    return terms


def _covers(t: ParseTree, terms: Sequence[str]) -> bool:
    return all(t.leaves.get(k) for k in terms)


def brute_match(g: Grammar, q, budget: EnumerationBudget) -> bool:
    """Some enumerated tree (rooted at any variable) has leaves ⊇ Q."""
    terms = _terminals_of(g, q)
    if terms is None:
        return False
    e = _Enumerator(g, budget)
    for sym in dict.fromkeys(p.head for p in g.productions):
        if any(_covers(t, terms) for t in e.trees(sym, budget.max_height)):
            return True
    return False


def brute_score_exact(g: Grammar, q, budget: EnumerationBudget) -> Fraction:
    terms = _terminals_of(g, q)
    trees = _Enumerator(g, budget).trees(g.start, budget.max_height)
    top = max(t.rho for t in trees)
    if terms is None:
        return Fraction(0)
    best = max((t.rho for t in trees if _covers(t, terms)), default=Fraction(0))
    return best / top


def brute_score(g: Grammar, q, budget: EnumerationBudget) -> float:
    return float(brute_score_exact(g, q, budget))


# ---------------------------------------------------------------- subsumption

def _paths(t: ParseTree) -> List[Tuple[str, ...]]:
    if t.label is None:
        return [(t.head,)]
    if not t.children:
        return [(t.label, "")]
    return [(t.label,) + p for c in t.children for p in _paths(c)]


def _subseq(p: Tuple[str, ...], p2: Tuple[str, ...]) -> bool:
    if p[-1] != p2[-1]:
        return False
    j = 0
    body2 = p2[:-1]
    for x in p[:-1]:
        while j < len(body2) and body2[j] != x:
            j += 1
        if j == len(body2):
            return False
        j += 1
    return True


def brute_subsumes(t: ParseTree, t2: ParseTree) -> bool:
    """Exhaustive search for an onto map paths(t2) -> paths(t) with p ≺ p'.

    Identical paths are interchangeable, so the search state is how many
    copies of each distinct path of t are already hit; every choice of image
    for every path of t2 is explored over that state space.
    """
    if t.head != t2.head:
        return False
    small, big = _paths(t), _paths(t2)
    if len(big) < len(small):
        return False
    distinct = sorted(set(small))
    need = tuple(small.count(p) for p in distinct)
    images = [[i for i, p in enumerate(distinct) if _subseq(p, p2)] for p2 in big]
    if any(not imgs for imgs in images):
        return False
    states = {tuple(0 for _ in distinct)}
    for j, imgs in enumerate(images):
        left = len(big) - j - 1
        nxt = set()
        for st in states:
            for i in imgs:
                new = list(st)
                if new[i] < need[i]:
                    new[i] += 1
                new_t = tuple(new)
                if sum(n - c for n, c in zip(need, new_t)) <= left:
                    nxt.add(new_t)
        states = nxt
        if not states:
            return False
    return need in states


def _could_subsume(a: ParseTree, t: ParseTree) -> bool:
    # cheap necessary conditions for a ≺ t
    return (a.height <= t.height and len(_paths_cached(a)) <= len(_paths_cached(t))
            and set(a.productions) <= set(t.productions)
            and set(a.leaves) == set(t.leaves))


def _paths_cached(t: ParseTree) -> List[Tuple[str, ...]]:
    p = t.__dict__.get("_oracle_paths")
    if p is None:
        p = _paths(t)
        t.__dict__["_oracle_paths"] = p
    return p


def brute_rptrees(g: Grammar, q, k: int, budget: EnumerationBudget) -> List[ParseTree]:
    """Top-k enumerated S-trees generating Q that no other enumerated tree
    strictly subsumes; ordered by probability, then serialization."""
    terms = _terminals_of(g, q)
    if terms is None:
        return []
    trees = _Enumerator(g, budget).trees(g.start, budget.max_height)
    pool = [t for t in trees if _covers(t, terms)]
    pool.sort(key=lambda t: (-t.rho, t.key))
    out: List[ParseTree] = []
    for t in pool:
        tp = sorted(_paths_cached(t))
        dominated = False
        for a in pool:
            if a is t or not _could_subsume(a, t):
                continue
            if sorted(_paths_cached(a)) == tp:
                continue
            if brute_subsumes(a, t):
                dominated = True
                break
        if not dominated:
            out.append(t)
            if len(out) == k:
                break
    return out


def is_rptree_brute(g: Grammar, t: ParseTree, budget: EnumerationBudget) -> bool:
    """No enumerated tree of the same head and at most t's height strictly subsumes t."""
    h = min(t.height, budget.max_height)
    tp = sorted(_paths_cached(t))
    for a in _Enumerator(g, budget).trees(t.head, h):
        if _could_subsume(a, t) and sorted(_paths_cached(a)) != tp and brute_subsumes(a, t):
            return False
    return True
