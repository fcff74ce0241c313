"""Max-semantics relevance: best matching parse tree over best parse tree."""

from __future__ import annotations

import hashlib
import os
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .grammar import Grammar, iteration_bound, scc_index_order, serialize_grammar
from .matcher import as_query

ScoredFamily = Dict[int, float]  # mask -> best probability


def _fold(rho_r, kids, exact_subsets: bool = True):
    """Product-union of scored families, starting from the production weight."""
    acc = {0: rho_r}
    for fam in kids:
        nxt: Dict[int, object] = {}
        for a, pa in acc.items():
            for b, pb in fam.items():
                x = a | b
                v = pa * pb
                old = nxt.get(x)
                if old is None or v > old:
                    nxt[x] = v
        acc = nxt
    return acc


def _merge(into: Dict[int, object], fam: Dict[int, object]) -> None:
    for x, v in fam.items():
        old = into.get(x)
        if old is None or v > old:
            into[x] = v


def score_families(g: Grammar, bits: Dict[int, int], n_keywords: int,
                   exact: bool = False) -> Tuple[List[Dict[int, object]], int]:
    """Jacobi fixpoint of the score recurrence over every symbol.

    Returns per-symbol scored families and the number of rounds. With
    ``exact`` the probabilities are Fractions instead of floats.
    """
    ix = g.ix
    probs = ix.fracs if exact else ix.probs
    one = Fraction(1) if exact else 1.0
    cap = iteration_bound(g, n_keywords)
    prev: List[Dict[int, object]] = [dict() for _ in range(ix.n)]
    for t in ix.terminals:
        prev[t] = {bits.get(t, 0): one}
    rounds = 0
    while rounds < cap:
        rounds += 1
        cur: List[Dict[int, object]] = [prev[v] if ix.is_terminal[v] else {} for v in range(ix.n)]
        for r, body in enumerate(ix.bodies):
            kids = [prev[s] for s in body]
            if any(not k for k in kids):
                continue
            _merge(cur[ix.heads[r]], _fold(probs[r], kids))
        if cur == prev:
            break
        prev = cur
    return prev, rounds


def _rho(g: Grammar, q, exact: bool = False) -> Tuple[object, object]:
    q = as_query(q)
    bits = q.terminal_bits(g)
    zero = Fraction(0) if exact else 0.0
    if bits is None:
        return zero, rho_max(g, exact)
    fams, _ = score_families(g, bits, len(q), exact)
    return fams[g.ix.start].get(q.full, zero), rho_max(g, exact)


def rho_max(g: Grammar, exact: bool = False):
    """Probability of the most probable parse tree of the start symbol."""
    key = "_rho_max_exact" if exact else "_rho_max"
    val = g.__dict__.get(key)
    if val is None:
        fams, _ = score_families(g, {}, 0, exact)
        val = fams[g.ix.start][0]
        object.__setattr__(g, key, val)
    return val


def set_rho_max(g: Grammar, value: float) -> None:
    object.__setattr__(g, "_rho_max", value)


def score(g: Grammar, q) -> float:
    """ρ(S,Q)/ρ_max(S) computed by the plain fixpoint."""
    best, top = _rho(g, q)
    return best / top if best else 0.0


def score_exact(g: Grammar, q) -> Fraction:
    best, top = _rho(g, q, exact=True)
    return best / top if best else Fraction(0)


# ---------------------------------------------------------------- OptScore

def _prune(fam: Dict[int, float]) -> Dict[int, float]:
    """Drop (X, p) when some strict superset Y of X has probability >= p."""
    if len(fam) < 2:
        return fam
    items = sorted(fam.items(), key=lambda kv: -bin(kv[0]).count("1"))
    kept: Dict[int, float] = {}
    for x, p in items:
        if any(x & y == x and x != y and py >= p for y, py in kept.items()):
            continue
        kept[x] = p
    return kept


def opt_score_families(g: Grammar, bits: Dict[int, int], n_keywords: int,
                       exact: bool = False) -> List[Dict[int, object]]:
    """SCC-staged scored fixpoint with probabilistic domination."""
    ix = g.ix
    probs = ix.fracs if exact else ix.probs
    one = Fraction(1) if exact else 1.0
    comps, _, recursive = scc_index_order(g)
    cap = iteration_bound(g, n_keywords)
    F: List[Dict[int, object]] = [dict() for _ in range(ix.n)]
    for ci, comp in enumerate(comps):
        first = comp[0]
        if ix.is_terminal[first]:
            F[first] = {bits.get(first, 0): one}
            continue
        if not recursive[ci]:
            acc: Dict[int, object] = {}
            for r in ix.prods_of[first]:
                kids = [F[s] for s in ix.bodies[r]]
                if any(not k for k in kids):
                    continue
                _merge(acc, _fold(probs[r], kids))
            F[first] = _prune(acc)
            continue
        inside = set(comp)
        prods = [r for v in comp for r in ix.prods_of[v]]
        prev: Dict[int, Dict[int, object]] = {v: {} for v in comp}
        for _ in range(cap):
            cur: Dict[int, Dict[int, object]] = {v: {} for v in comp}
            for r in prods:
                kids = [prev[s] if s in inside else F[s] for s in ix.bodies[r]]
                if any(not k for k in kids):
                    continue
                _merge(cur[ix.heads[r]], _fold(probs[r], kids))
            cur = {v: _prune(fam) for v, fam in cur.items()}
            if cur == prev:
                break
            prev = cur
        for v in comp:
            F[v] = prev[v]
    return F


def opt_score(g: Grammar, q, scc=None) -> float:
    """Same value as :func:`score` (within float reassociation), SCC-staged
    with probabilistic domination. The full-query entry is never dominated
    since it has no strict superset."""
    q = as_query(q)
    bits = q.terminal_bits(g)
    if bits is None:
        return 0.0
    fams = opt_score_families(g, bits, len(q))
    best = fams[g.ix.start].get(q.full, 0.0)
    return best / rho_max(g) if best else 0.0


# ---------------------------------------------------------------- sidecar

def grammar_hash(g: Grammar) -> str:
    return hashlib.sha256(serialize_grammar(g).encode("utf-8")).hexdigest()


def sidecar_path(grammar_path: str) -> str:
    return grammar_path + ".rhomax"


def write_rho_max_sidecar(g: Grammar, grammar_path: str) -> float:
    val = rho_max(g)
    with open(sidecar_path(grammar_path), "w", encoding="utf-8") as fh:
        fh.write(f"{grammar_hash(g)} {val!r}\n")
    return val


def read_rho_max_sidecar(g: Grammar, grammar_path: str) -> Optional[float]:
    """Cached ρ_max if the sidecar exists and matches the grammar's hash."""
    path = sidecar_path(grammar_path)
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        parts = fh.read().split()
    if len(parts) != 2 or parts[0] != grammar_hash(g):
        return None
    val = float(parts[1])
    set_rho_max(g, val)
    return val
