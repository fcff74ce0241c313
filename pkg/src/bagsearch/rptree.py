"""Top-k representative parse trees.

A representative tree (rpTree) is one that no parse tree with a different path
bag subsumes. The search builds, level by level, a bounded buffer of confirmed
rpTrees for every (symbol, keyword subset) pair together with a bound on the
probability of any rpTree that the buffer may be missing.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .grammar import (GENERAL_RECURSIVE, NON_RECURSIVE, Grammar, iteration_bound,
                      recursion_class, scc_index_order)
from .matcher import as_query
from .oracle import EnumerationBudget, _Enumerator
from .scorer import score_families
from .trees import ParseTree, tree_subsumes

ZERO = Fraction(0)
MAX_DOUBLINGS = 6


def default_capacity(k: int) -> int:
    return max(4 * k, 16)


@dataclass
class BoundedBuffer:
    """Confirmed rpTrees of one (symbol, subset), best first.

    ``lb`` bounds the probability of every rpTree of the current height that
    is not stored; ``is_trunc`` is true whenever that bound is positive.
    """

    trees: List[ParseTree] = field(default_factory=list)
    capacity: int = 16
    lb: Fraction = ZERO

    @property
    def is_trunc(self) -> bool:
        return self.lb > 0

    def signature(self) -> Tuple[Tuple[str, ...], Fraction]:
        return tuple(t.key for t in self.trees), self.lb


class RpTreeList(list):
    """Result list with provenance flags."""

    def __init__(self, trees=(), heuristic: bool = False, partial: bool = False,
                 capacity: int = 0, iterations: int = 0):
        super().__init__(trees)
        self.heuristic = heuristic
        self.partial = partial
        self.capacity = capacity
        self.iterations = iterations


def _order(t: ParseTree):
    return (-t.rho, t.key)


def _may_subsume(a: ParseTree, t: ParseTree) -> bool:
    """Cheap necessary conditions for a ≺ t with differing path bags."""
    if a.head != t.head or a.height > t.height or len(a.paths) > len(t.paths):
        return False
    if a.height == t.height and a.label != t.label:
        return False
    if a.leaves.keys() != t.leaves.keys():
        return False
    return a.paths != t.paths


def _strictly_subsumes(a: ParseTree, t: ParseTree) -> bool:
    return _may_subsume(a, t) and tree_subsumes(a, t)


class _Setup:
    def __init__(self, g: Grammar, q):
        q = as_query(q)
        self.g = g
        self.q = q
        self.ix = g.ix
        self.bits = q.terminal_bits(g)
        self.full = q.full
        self.leaves = {t: ParseTree.leaf(self.ix.names[t]) for t in self.ix.terminals}

    def terminal_mask(self, t: int) -> int:
        return self.bits.get(t, 0) if self.bits else 0


class _Source:
    """Lazy best-first enumeration of one production over fixed child lists."""

    def __init__(self, label: str, head: str, prob: Fraction, lists: Sequence[List[ParseTree]]):
        self.label = label
        self.head = head
        self.prob = prob
        self.lists = lists
        self.seen = set()

    def make(self, idx: Tuple[int, ...]) -> ParseTree:
        kids = [lst[i] for lst, i in zip(self.lists, idx)]
        rho = self.prob
        for c in kids:
            rho *= c.rho
        return ParseTree(self.label, self.head, kids, rho)


class _FixedSource:
    def __init__(self, trees: List[ParseTree]):
        self.trees = trees


def _best_first(sources: List[object]):
    """Yield candidate trees in (probability desc, serialization asc) order."""
    heap = []
    for si, src in enumerate(sources):
        if isinstance(src, _FixedSource):
            if src.trees:
                t = src.trees[0]
                heapq.heappush(heap, (-t.rho, t.key, si, 0, t))
        else:
            if all(src.lists):
                idx = (0,) * len(src.lists)
                src.seen.add(idx)
                t = src.make(idx)
                heapq.heappush(heap, (-t.rho, t.key, si, idx, t))
    while heap:
        _, _, si, idx, t = heapq.heappop(heap)
        yield t
        src = sources[si]
        if isinstance(src, _FixedSource):
            if idx + 1 < len(src.trees):
                nt = src.trees[idx + 1]
                heapq.heappush(heap, (-nt.rho, nt.key, si, idx + 1, nt))
            continue
        for j in range(len(idx)):
            if idx[j] + 1 < len(src.lists[j]):
                nidx = idx[:j] + (idx[j] + 1,) + idx[j + 1:]
                if nidx not in src.seen:
                    src.seen.add(nidx)
                    nt = src.make(nidx)
                    heapq.heappush(heap, (-nt.rho, nt.key, si, nidx, nt))


def _best_upper(g: Grammar, setup: _Setup) -> List[Dict[int, Fraction]]:
    """Exact best probability per (symbol, subset) over all trees."""
    fams, _ = score_families(g, setup.bits or {}, len(setup.q), exact=True)
    return fams


def _rp_fixpoint(setup: _Setup, capacity: int, best: List[Dict[int, Fraction]],
                 max_iterations: int) -> Tuple[Dict[Tuple[int, int], BoundedBuffer], int, bool]:
    ix = setup.ix
    state: Dict[Tuple[int, int], BoundedBuffer] = {}
    for t in ix.terminals:
        state[(t, setup.terminal_mask(t))] = BoundedBuffer([setup.leaves[t]], capacity)
    masks_of: Dict[int, List[int]] = {}
    for (v, x) in state:
        masks_of.setdefault(v, []).append(x)

    iteration = 0
    while iteration < max_iterations:
        iteration += 1
        new_state: Dict[Tuple[int, int], BoundedBuffer] = {
            key: buf for key, buf in state.items() if ix.is_terminal[key[0]]}
        for v in ix.variables:
            sources: Dict[int, List[object]] = {}
            miss: Dict[int, Fraction] = {}
            for r in ix.prods_of[v]:
                body = ix.bodies[r]
                options = [sorted(masks_of.get(s, ())) for s in body]
                if any(not o for o in options):
                    continue
                for combo in product(*options):
                    x = 0
                    for m in combo:
                        x |= m
                    bufs = [state[(s, m)] for s, m in zip(body, combo)]
                    bound = ZERO
                    for j, bj in enumerate(bufs):
                        if bj.lb > 0:
                            term = bj.lb
                            for l, (s, m) in enumerate(zip(body, combo)):
                                if l != j:
                                    term *= best[s].get(m, ZERO)
                            if term > bound:
                                bound = term
                    bound *= ix.fracs[r]
                    if bound > miss.get(x, ZERO):
                        miss[x] = bound
                    else:
                        miss.setdefault(x, ZERO)
                    if all(b.trees for b in bufs):
                        sources.setdefault(x, []).append(
                            _Source(ix.labels[r], ix.names[v], ix.fracs[r], [b.trees for b in bufs]))
            for x in sorted(set(sources) | set(miss)):
                old = state.get((v, x))
                srcs = list(sources.get(x, []))
                if old is not None and old.trees:
                    srcs.append(_FixedSource(old.trees))
                tau = max(miss.get(x, ZERO), old.lb if old is not None else ZERO)
                new_state[(v, x)] = _select(srcs, tau, capacity)
        changed = set(new_state) != set(state) or any(
            new_state[key].signature() != state[key].signature() for key in new_state)
        state = new_state
        masks_of = {}
        for (s, x), buf in state.items():
            if buf.trees or buf.lb > 0:
                masks_of.setdefault(s, []).append(x)
        if not changed:
            return state, iteration, True
    return state, iteration, False


def _select(sources: List[object], tau: Fraction, capacity: int) -> BoundedBuffer:
    accepted: List[ParseTree] = []
    seen = set()
    for t in _best_first(sources):
        if t.rho <= tau:
            break
        if len(accepted) > capacity and t.rho < accepted[capacity].rho:
            break
        if t.key in seen:
            continue
        seen.add(t.key)
        if any(a.rho >= t.rho and _strictly_subsumes(a, t) for a in accepted):
            continue
        if accepted and accepted[-1].rho == t.rho:
            accepted = [a for a in accepted if not (a.rho == t.rho and _strictly_subsumes(t, a))]
        accepted.append(t)
    if len(accepted) > capacity:
        tau = max(tau, accepted[capacity].rho)
        accepted = accepted[:capacity]
    return BoundedBuffer(accepted, capacity, tau)


def top_k_rptrees(g: Grammar, q, k: int, c: Optional[int] = None,
                  fast_path: bool = True, max_doublings: int = MAX_DOUBLINGS) -> RpTreeList:
    """The k most probable rpTrees of the start symbol generating exactly Q.

    Exact for non-recursive and linear-recursive grammars; for general
    recursion the result is flagged ``heuristic``. When the buffers cannot
    certify k trees the capacity is doubled, up to ``max_doublings`` times,
    after which the best certified prefix is returned flagged ``partial``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    cls = recursion_class(g)
    if fast_path and cls == NON_RECURSIVE:
        return top_k_trees_nonrecursive(g, q, k, c)
    setup = _Setup(g, q)
    heuristic = cls == GENERAL_RECURSIVE
    if setup.bits is None:
        return RpTreeList([], heuristic)
    best = _best_upper(g, setup)
    if setup.full not in best[setup.ix.start]:
        return RpTreeList([], heuristic)
    capacity = c if c is not None else default_capacity(k)
    cap_iters = 10 * iteration_bound(g, len(setup.q)) + 50
    root = (setup.ix.start, setup.full)
    last: List[ParseTree] = []
    iterations = 0
    for attempt in range(max_doublings + 1):
        state, iterations, converged = _rp_fixpoint(setup, capacity, best, cap_iters)
        buf = state.get(root, BoundedBuffer())
        sure = [t for t in buf.trees if t.rho > buf.lb]
        if converged and len(sure) >= k:
            return RpTreeList(sure[:k], heuristic, False, capacity, iterations)
        if converged and buf.lb == 0:
            return RpTreeList(buf.trees[:k], heuristic, False, capacity, iterations)
        last = sure
        if attempt < max_doublings:
            capacity *= 2
    return RpTreeList(last[:k], heuristic, True, capacity, iterations)


def top_k_trees_nonrecursive(g: Grammar, q, k: int, c: Optional[int] = None) -> RpTreeList:
    """Exact k best trees of a non-recursive grammar; every tree is an rpTree,
    so no subsumption checks are needed."""
    if recursion_class(g) != NON_RECURSIVE:
        raise ValueError("grammar is recursive; use top_k_rptrees")
    setup = _Setup(g, q)
    if setup.bits is None:
        return RpTreeList([])
    ix = setup.ix
    comps, _, _ = scc_index_order(g)
    lists: Dict[int, Dict[int, List[ParseTree]]] = {}
    for comp in comps:
        v = comp[0]
        if ix.is_terminal[v]:
            lists[v] = {setup.terminal_mask(v): [setup.leaves[v]]}
            continue
        sources: Dict[int, List[object]] = {}
        for r in ix.prods_of[v]:
            body = ix.bodies[r]
            options = [sorted(lists[s]) for s in body]
            if any(not o for o in options):
                continue
            for combo in product(*options):
                x = 0
                for m in combo:
                    x |= m
                sources.setdefault(x, []).append(_Source(
                    ix.labels[r], ix.names[v], ix.fracs[r],
                    [lists[s][m] for s, m in zip(body, combo)]))
        out: Dict[int, List[ParseTree]] = {}
        for x, srcs in sources.items():
            kept: List[ParseTree] = []
            seen = set()
            for t in _best_first(srcs):
                # keep ties with the k-th tree so parents stay exact
                if len(kept) >= k and t.rho < kept[k - 1].rho:
                    break
                if t.key not in seen:
                    seen.add(t.key)
                    kept.append(t)
            out[x] = kept
        lists[v] = out
    return RpTreeList(lists[ix.start].get(setup.full, [])[:k], False, False, k, 1)


def is_rptree(g: Grammar, t: ParseTree, height_budget: int, max_trees: int = 200_000) -> bool:
    """No tree of the same head, at most t's height, strictly subsumes t.

    Raises ``EnumerationBudgetExceeded`` when the candidate enumeration is
    larger than ``max_trees``.
    """
    h = min(t.height, height_budget)
    enum = _Enumerator(g, EnumerationBudget(h, max_trees))
    for other in enum.trees(t.head, h):
        if _strictly_subsumes(other, t):
            return False
    return True
