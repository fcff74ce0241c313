"""Repository-level search: inverted indexes, boolean search with reuse
caching, and top-k retrieval by the Threshold Algorithm."""

from __future__ import annotations

import os
from bisect import insort
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .grammar import Grammar, keyword_of
from .matcher import Query, as_query, opt_match_families
from .repository import Repository
from .scorer import opt_score, read_rho_max_sidecar, rho_max

INDEX_HEADER = "bagsearch-index v1"


class StaleIndex(RuntimeError):
    pass


@dataclass
class Indexes:
    inverted: Dict[str, List[str]]
    score_lists: Dict[str, List[Tuple[str, float]]]

    def lookup(self) -> Dict[str, Dict[str, float]]:
        """Random-access view: keyword -> {grammar id: single-keyword score}."""
        cached = self.__dict__.get("_lookup")
        if cached is None:
            cached = {k: dict(v) for k, v in self.score_lists.items()}
            self.__dict__["_lookup"] = cached
        return cached


def grammar_keywords(g: Grammar) -> List[str]:
    return sorted({keyword_of(t) for t in g.terminals})


def _single_scores(g: Grammar) -> List[Tuple[str, float]]:
    return [(k, opt_score(g, Query((k,)))) for k in grammar_keywords(g)]


def build_indexes(repo: Repository, workers: int = 1) -> Indexes:
    """Inverted lists plus per-keyword score lists (score desc, id asc)."""
    ids = repo.ids
    if workers > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_single_scores, [repo[g] for g in ids], chunksize=4))
    else:
        results = [_single_scores(repo[g]) for g in ids]
    inverted: Dict[str, List[str]] = {}
    lists: Dict[str, List[Tuple[str, float]]] = {}
    for gid, scores in zip(ids, results):
        for k, s in scores:
            inverted.setdefault(k, []).append(gid)
            if s > 0:
                lists.setdefault(k, []).append((gid, s))
    for k in inverted:
        inverted[k].sort()
    for k in lists:
        lists[k].sort(key=lambda e: (-e[1], e[0]))
    return Indexes(dict(sorted(inverted.items())), dict(sorted(lists.items())))


# ---------------------------------------------------------------- persistence

def write_index(path: str, repo: Repository, idx: Indexes) -> None:
    lines = [INDEX_HEADER]
    for gid in repo.ids:
        lines.append("\t".join(("grammar", gid, repo.file_hashes.get(gid, ""),
                                repr(rho_max(repo[gid])))))
    for k, ids in idx.inverted.items():
        lines.append("\t".join(["kw", k] + ids))
    for k, entries in idx.score_lists.items():
        for gid, s in entries:
            lines.append("\t".join(("score", k, gid, repr(s))))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_index(path: str, repo: Repository) -> Indexes:
    """Load a persisted index; raises StaleIndex if any grammar file changed."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != INDEX_HEADER:
        raise StaleIndex(f"{path}: not a {INDEX_HEADER} file")
    inverted: Dict[str, List[str]] = {}
    lists: Dict[str, List[Tuple[str, float]]] = {}
    seen: Set[str] = set()
    for line in lines[1:]:
        parts = line.split("\t")
        if parts[0] == "grammar":
            gid, digest, rmax = parts[1], parts[2], parts[3]
            if gid not in repo.grammars or repo.file_hashes.get(gid, "") != digest:
                raise StaleIndex(f"index entry for {gid} does not match the repository")
            object.__setattr__(repo[gid], "_rho_max", float(rmax))
            seen.add(gid)
        elif parts[0] == "kw":
            inverted[parts[1]] = parts[2:]
        elif parts[0] == "score":
            lists.setdefault(parts[1], []).append((parts[2], float(parts[3])))
    if seen != set(repo.ids):
        raise StaleIndex("index and repository list different grammars")
    return Indexes(inverted, lists)


def load_sidecars(repo: Repository) -> int:
    n = 0
    for gid, path in repo.paths.items():
        if read_rho_max_sidecar(repo[gid], path) is not None:
            n += 1
    return n


# ---------------------------------------------------------------- boolean search

@dataclass
class SearchStats:
    candidates: int = 0
    evaluations: Dict[str, int] = field(default_factory=dict)
    support_evaluations: int = 0
    cache_peak: int = 0
    cache_log: List[Tuple[str, str, int]] = field(default_factory=list)
    implied: int = 0


def _candidates(idx: Indexes, q: Query, all_ids: List[str]) -> List[str]:
    if not q.keywords:
        return list(all_ids)
    sets = []
    for k in q.keywords:
        lst = idx.inverted.get(k)
        if not lst:
            return []
        sets.append(set(lst))
    common = set.intersection(*sets)
    return [g for g in all_ids if g in common]


def search_all(repo: Repository, q, idx: Indexes, caching: bool = True,
               stats: Optional[SearchStats] = None) -> Set[str]:
    """Ids of every grammar matching ``q``.

    Candidates come from intersecting the inverted lists. With caching on,
    grammars are visited in reuse order; the start-symbol family of each
    visited grammar that some later candidate reuses is kept and seeds those
    dependents, then dropped once they are done. Reused grammars that lack
    some keyword are still evaluated once (keywords they lack simply never
    appear) so that their family can be shared.
    """
    q = as_query(q)
    stats = stats if stats is not None else SearchStats()
    cands = _candidates(idx, q, repo.ids)
    stats.candidates = len(cands)
    if not cands:
        return set()
    if not caching:
        out = set()
        for gid in cands:
            stats.evaluations[gid] = stats.evaluations.get(gid, 0) + 1
            if opt_match_families(repo[gid], q)[0]:
                out.add(gid)
        return out

    cand_set = set(cands)
    # grammars to visit: candidates and everything they (transitively) reuse
    visit: Set[str] = set()
    stack = list(cands)
    while stack:
        g = stack.pop()
        if g in visit:
            continue
        visit.add(g)
        stack.extend(repo.reuses[g])
    pending = {g: sum(1 for h in repo.reused_by[g] if h in visit) for g in visit}
    cache: Dict[str, FrozenSet[int]] = {}
    matched: Set[str] = set()
    for gid in repo.topo_order:
        if gid not in visit:
            continue
        g = repo[gid]
        if gid in matched:
            result = True
        else:
            seeds = {repo[p].start: cache[p] for p in repo.reuses[gid] if p in cache}
            bits = _support_bits(g, q)
            stats.evaluations[gid] = stats.evaluations.get(gid, 0) + 1
            if gid not in cand_set:
                stats.support_evaluations += 1
            result, fam = opt_match_families(g, q, seeds=seeds, bits=bits,
                                             early_exit=True)
            if gid not in cand_set:
                result = False
            if not result and pending[gid] > 0:
                cache[gid] = fam.get(g.ix.start, frozenset())
                stats.cache_log.append(("store", gid, len(cache)))
                stats.cache_peak = max(stats.cache_peak, len(cache))
        if result:
            matched.add(gid)
            for h in repo.reused_by[gid]:
                if h in cand_set and h not in matched:
                    matched.add(h)
                    stats.implied += 1
        for p in repo.reuses[gid]:
            if p in pending:
                pending[p] -= 1
                if pending[p] == 0 and p in cache:
                    del cache[p]
                    stats.cache_log.append(("evict", p, len(cache)))
    return matched & cand_set


def _support_bits(g: Grammar, q: Query) -> Dict[int, int]:
    bits: Dict[int, int] = {}
    for i, k in enumerate(q.keywords):
        t = g.terminal_for(k)
        if t is not None:
            bits[g.ix.index[t]] = 1 << i
    return bits


# ---------------------------------------------------------------- top-k

@dataclass
class TopKStats:
    candidates: int = 0
    sorted_accesses: int = 0
    random_accesses: int = 0
    full_scores: int = 0
    scored: List[str] = field(default_factory=list)
    theta: float = 0.0
    upper_bounds: Dict[str, float] = field(default_factory=dict)


def top_k(repo: Repository, q, k: int, idx: Indexes,
          stats: Optional[TopKStats] = None) -> List[Tuple[str, float]]:
    """The k best grammars by score, via the Threshold Algorithm.

    Lists are read round-robin. A newly seen grammar is looked up in every
    list; its upper bound is the minimum single-keyword score. The full score
    is computed only when that bound could still place the grammar in the
    current top k (ties resolved by id). The scan stops once the threshold,
    the minimum of the last scores read, is strictly below the k-th score or
    some list runs out.
    """
    if k < 1:
        raise ValueError("k must be positive")
    q = as_query(q)
    stats = stats if stats is not None else TopKStats()
    if not q.keywords:
        ids = sorted(repo.ids)
        return [(g, 1.0) for g in ids[:k]]
    lists = []
    for kw in q.keywords:
        lst = idx.score_lists.get(kw)
        if not lst:
            return []
        lists.append(lst)
    stats.candidates = len(_candidates(idx, q, repo.ids))
    lookup = idx.lookup()
    tables = [lookup[kw] for kw in q.keywords]
    top: List[Tuple[float, str]] = []  # (-score, id), ascending
    seen: Set[str] = set()
    pos = [0] * len(lists)
    frontier = [lst[0][1] for lst in lists]

    def kth():
        return (-top[k - 1][0], top[k - 1][1]) if len(top) >= k else None

    while True:
        exhausted = False
        for i, lst in enumerate(lists):
            if pos[i] >= len(lst):
                exhausted = True
                continue
            gid, s = lst[pos[i]]
            pos[i] += 1
            stats.sorted_accesses += 1
            frontier[i] = s
            if gid in seen:
                continue
            seen.add(gid)
            ub = s
            for j, table in enumerate(tables):
                if j == i:
                    continue
                stats.random_accesses += 1
                v = table.get(gid)
                if v is None:
                    ub = 0.0
                    break
                ub = min(ub, v)
            stats.upper_bounds[gid] = ub
            if ub <= 0:
                continue
            bound = kth()
            if bound is not None and (ub < bound[0] or (ub == bound[0] and gid > bound[1])):
                continue
            full = opt_score(repo[gid], q)
            stats.full_scores += 1
            stats.scored.append(gid)
            if full > 0:
                insort(top, (-full, gid))
                del top[k:]
        if exhausted or all(p >= len(l) for p, l in zip(pos, lists)):
            break
        bound = kth()
        if bound is not None and min(frontier) < bound[0]:
            break
    bound = kth()
    stats.theta = bound[0] if bound else 0.0
    return [(gid, -neg) for neg, gid in top]


def exhaustive_top_k(repo: Repository, q, k: int) -> List[Tuple[str, float]]:
    """Reference ranking: score every grammar and sort."""
    q = as_query(q)
    scored = [(gid, opt_score(repo[gid], q)) for gid in repo.ids]
    scored = [e for e in scored if e[1] > 0]
    scored.sort(key=lambda e: (-e[1], e[0]))
    return scored[:k]


def rho_max_all(repo: Repository, ids: Optional[Iterable[str]] = None) -> Dict[str, float]:
    return {gid: rho_max(repo[gid]) for gid in (ids or repo.ids)}
