"""Deciding whether a grammar matches a keyword query.

Query subsets are bit masks over the query keywords. A family F(M) is the set
of masks X such that some parse tree of M has leaves(T) ∩ Q = X (or, with
domination on, the maximal such masks).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .grammar import Grammar, Production, iteration_bound, scc_index_order

MAX_QUERY = 16


class QueryTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Query:
    """An "and" keyword query; keyword i owns bit i."""

    keywords: Tuple[str, ...]

    def __init__(self, keywords: Iterable[str]):
        kws = tuple(dict.fromkeys(keywords))
        if len(kws) > MAX_QUERY:
            raise QueryTooLarge(f"query has {len(kws)} keywords; at most {MAX_QUERY} supported")
        object.__setattr__(self, "keywords", kws)

    @classmethod
    def parse(cls, text: str) -> "Query":
        return cls(text.split())

    @property
    def full(self) -> int:
        return (1 << len(self.keywords)) - 1

    def __len__(self) -> int:
        return len(self.keywords)

    def subset(self, mask: int) -> Tuple[str, ...]:
        return tuple(k for i, k in enumerate(self.keywords) if mask >> i & 1)

    def terminal_bits(self, g: Grammar) -> Optional[Dict[int, int]]:
        """Map interned terminal id -> bit, or None when a keyword is missing."""
        bits: Dict[int, int] = {}
        for i, k in enumerate(self.keywords):
            t = g.terminal_for(k)
            if t is None:
                return None
            bits[g.ix.index[t]] = 1 << i
        return bits


def as_query(q) -> Query:
    if isinstance(q, Query):
        return q
    if isinstance(q, str):
        return Query.parse(q)
    return Query(q)


def is_subset(a: int, b: int) -> bool:
    return a & b == a


def maximal(masks: Iterable[int]) -> FrozenSet[int]:
    """The antichain of masks not strictly contained in another mask."""
    ordered = sorted(set(masks), key=lambda m: -bin(m).count("1"))
    kept: List[int] = []
    for m in ordered:
        if not any(m & k == m for k in kept):
            kept.append(m)
    return frozenset(kept)


class KeywordSetFamily:
    """Per-symbol families of query subsets, optionally kept as antichains."""

    def __init__(self, dominate: bool = True):
        self.dominate = dominate
        self.sets: Dict[object, Set[int]] = {}

    def __getitem__(self, sym) -> Set[int]:
        return self.sets.setdefault(sym, set())

    def get(self, sym) -> FrozenSet[int]:
        return frozenset(self.sets.get(sym, ()))

    def add_element(self, sym, x: int) -> bool:
        fam = self.sets.setdefault(sym, set())
        if x in fam:
            return False
        if self.dominate:
            if any(x & y == x for y in fam):
                return False
            for y in [y for y in fam if y & x == y]:
                fam.discard(y)
        fam.add(x)
        return True


def product_union(families: Sequence[Iterable[int]], dominate: bool) -> Set[int]:
    acc = {0}
    for fam in families:
        acc = {a | b for a in acc for b in fam}
        if dominate and len(acc) > 1:
            acc = set(maximal(acc))
        if not acc:
            break
    return acc


@dataclass
class MatchTrace:
    matched: bool
    iterations: int
    families: Dict[str, FrozenSet[int]] = field(default_factory=dict)
    early_exit: bool = False


def _prepare(g: Grammar, q):
    q = as_query(q)
    bits = q.terminal_bits(g)
    return q, bits


def match_trace(g: Grammar, q, dominate: bool = True) -> MatchTrace:
    """Jacobi fixpoint over all productions, with bookkeeping."""
    q, bits = _prepare(g, q)
    if bits is None:
        return MatchTrace(False, 0)
    ix = g.ix
    full = q.full
    cap = iteration_bound(g, len(q))
    prev: List[Optional[Set[int]]] = [None] * ix.n
    for t in ix.terminals:
        prev[t] = {bits.get(t, 0)}
        if bits.get(t, 0) == full:
            return MatchTrace(True, 0, early_exit=True)
    empty: Set[int] = set()
    i = 0
    while i < cap:
        i += 1
        fam = KeywordSetFamily(dominate)
        for t in ix.terminals:
            fam.sets[t] = prev[t]
        for r, body in enumerate(ix.bodies):
            kids = [prev[s] or empty for s in body]
            if any(not k for k in kids):
                continue
            head = ix.heads[r]
            for x in product_union(kids, dominate):
                fam.add_element(head, x)
                if x == full:
                    return MatchTrace(True, i, _named(ix, fam.sets), early_exit=True)
        cur: List[Optional[Set[int]]] = [fam.sets.get(v) for v in range(ix.n)]
        if all((cur[v] or empty) == (prev[v] or empty) for v in ix.variables):
            return MatchTrace(False, i, _named(ix, fam.sets))
        prev = cur
    return MatchTrace(False, i, _named(ix, {v: prev[v] for v in range(ix.n) if prev[v]}))


def _named(ix, sets: Mapping[int, Set[int]]) -> Dict[str, FrozenSet[int]]:
    return {ix.names[v]: frozenset(s) for v, s in sets.items() if s is not None}


def match(g: Grammar, q, dominate: bool = True) -> bool:
    """True iff some bag in L(G) contains every keyword of ``q``."""
    return match_trace(g, q, dominate).matched


# ---------------------------------------------------------------- OptMatch

def _reachable_classes(g: Grammar, seeds: Mapping[int, object]) -> Set[int]:
    ix = g.ix
    _, class_of, _ = scc_index_order(g)
    seen = {ix.start}
    stack = [ix.start]
    while stack:
        v = stack.pop()
        if v in seeds:
            continue
        for c in ix.children[v]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return {class_of[v] for v in seen}


def opt_match_families(g: Grammar, q, seeds: Optional[Mapping[str, Iterable[int]]] = None,
                       early_exit: bool = True, bits: Optional[Dict[int, int]] = None
                       ) -> Tuple[bool, Dict[int, FrozenSet[int]]]:
    """SCC-staged fixpoint.

    Returns (matched, F) where F maps interned symbol ids to dominated
    families. ``seeds`` pre-fixes families of named symbols, which are then
    not expanded. With ``early_exit`` off the run always reaches the fixpoint
    (used to cache a reused grammar's family). ``bits`` overrides the keyword
    lookup so a caller can evaluate grammars missing some keywords.
    """
    q = as_query(q)
    if bits is None:
        bits = q.terminal_bits(g)
        if bits is None:
            return False, {}
    ix = g.ix
    full = q.full
    comps, class_of, recursive = scc_index_order(g)
    cap = iteration_bound(g, len(q))
    F: Dict[int, FrozenSet[int]] = {}
    seed_ids: Dict[int, FrozenSet[int]] = {}
    for name, fam in (seeds or {}).items():
        if name in ix.index:
            seed_ids[ix.index[name]] = frozenset(fam)
    F.update(seed_ids)
    needed = _reachable_classes(g, seed_ids) if seed_ids else None
    found = any(full in fam for fam in seed_ids.values())
    if found and early_exit:
        return True, F
    for ci, comp in enumerate(comps):
        if needed is not None and ci not in needed:
            continue
        members = [v for v in comp if v not in seed_ids]
        if not members:
            continue
        if ix.is_terminal[members[0]]:
            t = members[0]
            F[t] = frozenset((bits.get(t, 0),))
            if bits.get(t, 0) == full:
                found = True
                if early_exit:
                    return True, F
            continue
        prods = [r for v in members for r in ix.prods_of[v]]
        if not recursive[ci]:
            v = members[0]
            fam = KeywordSetFamily(True)
            for r in prods:
                kids = [F.get(s, frozenset()) for s in ix.bodies[r]]
                if any(not k for k in kids):
                    continue
                for x in product_union(kids, True):
                    fam.add_element(v, x)
            F[v] = fam.get(v)
            if full in F[v]:
                found = True
                if early_exit:
                    return True, F
            continue
        inside = set(members)
        prev: Dict[int, FrozenSet[int]] = {v: frozenset() for v in members}
        for _ in range(cap):
            fam = KeywordSetFamily(True)
            hit = False
            for r in prods:
                kids = [prev[s] if s in inside else F.get(s, frozenset()) for s in ix.bodies[r]]
                if any(not k for k in kids):
                    continue
                head = ix.heads[r]
                for x in product_union(kids, True):
                    fam.add_element(head, x)
                    if x == full:
                        hit = True
            cur = {v: fam.get(v) for v in members}
            if hit and early_exit:
                F.update(cur)
                return True, F
            if cur == prev:
                break
            prev = cur
        F.update(prev)
        if any(full in prev[v] for v in members):
            found = True
    return found, F


def opt_match(g: Grammar, q, scc=None) -> bool:
    """Same answer as :func:`match`, computed class by class in SCC order.

    ``scc`` is accepted for interface parity; the order is cached on the
    grammar either way.
    """
    return opt_match_families(g, q)[0]


# ---------------------------------------------------------------- baseline

class Binarized:
    """Grammar with at most two body symbols per production.

    A production r: M -> a1 ... an with n > 2 becomes a chain through fresh
    symbols ``r#1 .. r#(n-2)``.
    """

    def __init__(self, g: Grammar):
        ix = g.ix
        names = list(ix.names)
        is_terminal = list(ix.is_terminal)
        rules: List[Tuple[int, Tuple[int, ...]]] = []
        for r, body in enumerate(ix.bodies):
            head = ix.heads[r]
            if len(body) <= 2:
                rules.append((head, body))
                continue
            cur = head
            for k in range(len(body) - 2):
                fresh = len(names)
                names.append(f"{ix.labels[r]}#{k + 1}")
                is_terminal.append(False)
                rules.append((cur, (body[k], fresh)))
                cur = fresh
            rules.append((cur, (body[-2], body[-1])))
        self.names = names
        self.is_terminal = is_terminal
        self.rules = rules
        self.start = ix.start


def binarize(g: Grammar) -> Binarized:
    b = g.__dict__.get("_binarized")
    if b is None:
        b = Binarized(g)
        object.__setattr__(g, "_binarized", b)
    return b


def baseline_match(g: Grammar, q) -> bool:
    """Intersect the binarized grammar with Q and test emptiness.

    Symbols of the product grammar are pairs (M, X); the emptiness test is
    the linear-time productive-symbol worklist.
    """
    q, bits = _prepare(g, q)
    if bits is None:
        return False
    b = binarize(g)
    nq = len(q)
    width = 1 << nq
    full = q.full
    n_sym = len(b.names) * width
    rule_heads: List[int] = []
    rule_need: List[int] = []
    users: List[List[int]] = [[] for _ in range(n_sym)]
    productive = bytearray(n_sym)
    queue: List[int] = []

    def add_rule(head: int, body: Tuple[int, ...]) -> None:
        idx = len(rule_heads)
        rule_heads.append(head)
        distinct = set(body)
        rule_need.append(len(distinct))
        for s in distinct:
            users[s].append(idx)
        if not distinct and not productive[head]:
            productive[head] = 1
            queue.append(head)

    for t, is_t in enumerate(b.is_terminal):
        if is_t:
            sym = t * width + bits.get(t, 0)
            productive[sym] = 1
            queue.append(sym)
    for head, body in b.rules:
        base_h = head * width
        if not body:
            add_rule(base_h, ())
        elif len(body) == 1:
            a = body[0] * width
            for x in range(width):
                add_rule(base_h + x, (a + x,))
        else:
            a, c = body[0] * width, body[1] * width
            for x1 in range(width):
                for x2 in range(width):
                    add_rule(base_h + (x1 | x2), (a + x1, c + x2))
    while queue:
        s = queue.pop()
        for idx in users[s]:
            rule_need[idx] -= 1
            if rule_need[idx] == 0:
                h = rule_heads[idx]
                if not productive[h]:
                    productive[h] = 1
                    queue.append(h)
    return any(productive[m * width + full] for m in range(len(b.names)))
