"""Repositories of grammars: loading, consistency checks, and the reuse DAG."""

from __future__ import annotations

import hashlib
import heapq
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from .grammar import Grammar, GrammarError, Violation, _tarjan, compile_keywords, parse_grammar


@dataclass(eq=False)
class Repository:
    """Compiled grammars keyed by id, in manifest order."""

    grammars: Dict[str, Grammar]
    paths: Dict[str, str] = field(default_factory=dict)
    file_hashes: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_grammars(cls, grammars) -> "Repository":
        out: Dict[str, Grammar] = {}
        for g in grammars:
            if g.id in out:
                raise GrammarError(f"duplicate grammar id {g.id}")
            out[g.id] = compile_keywords(g)
        return cls(out)

    @property
    def ids(self) -> List[str]:
        return list(self.grammars)

    def __len__(self) -> int:
        return len(self.grammars)

    def __getitem__(self, gid: str) -> Grammar:
        return self.grammars[gid]

    @cached_property
    def reuse_edges(self) -> List[Tuple[str, str]]:
        """(Gi, Gj) when Gj uses the start symbol of Gi as a variable."""
        by_start: Dict[str, List[str]] = {}
        for gid, g in self.grammars.items():
            by_start.setdefault(g.start, []).append(gid)
        edges = []
        for gj, g in self.grammars.items():
            for v in g.variables:
                for gi in by_start.get(v, ()):
                    if gi != gj:
                        edges.append((gi, gj))
        return edges

    @cached_property
    def reused_by(self) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = {gid: [] for gid in self.grammars}
        for gi, gj in self.reuse_edges:
            out[gi].append(gj)
        return out

    @cached_property
    def reuses(self) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = {gid: [] for gid in self.grammars}
        for gi, gj in self.reuse_edges:
            out[gj].append(gi)
        return out

    @cached_property
    def topo_order(self) -> List[str]:
        """Reused grammars before their users; ties keep manifest order."""
        ids = self.ids
        pos = {gid: i for i, gid in enumerate(ids)}
        indeg = {gid: len(self.reuses[gid]) for gid in ids}
        ready = [pos[g] for g in ids if indeg[g] == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            g = ids[heapq.heappop(ready)]
            order.append(g)
            for h in self.reused_by[g]:
                indeg[h] -= 1
                if indeg[h] == 0:
                    heapq.heappush(ready, pos[h])
        if len(order) != len(ids):
            raise GrammarError("reuse graph has a cycle")
        return order


def _file_sha(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def read_manifest(manifest: str) -> List[str]:
    base = os.path.dirname(os.path.abspath(manifest))
    out = []
    with open(manifest, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            out.append(line if os.path.isabs(line) else os.path.join(base, line))
    return out


def load_repository(manifest: str) -> Repository:
    grammars: Dict[str, Grammar] = {}
    paths: Dict[str, str] = {}
    hashes: Dict[str, str] = {}
    for path in read_manifest(manifest):
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            g = compile_keywords(parse_grammar(text))
        except GrammarError as exc:
            raise GrammarError(f"{path}: {exc}") from exc
        if g.id in grammars:
            raise GrammarError(f"{path}: duplicate grammar id {g.id}")
        grammars[g.id] = g
        paths[g.id] = path
        hashes[g.id] = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Repository(grammars, paths, hashes)


def check_repository(repo: Repository) -> List[Violation]:
    """Shared symbols with differing production sets, and reuse cycles."""
    out: List[Violation] = []
    first: Dict[str, Tuple[str, frozenset]] = {}
    reported = set()
    for gid, g in repo.grammars.items():
        prods: Dict[str, set] = {}
        for p in g.productions:
            prods.setdefault(p.head, set()).add((p.label, tuple(sorted(p.body)), p.prob))
        for name in g.ix.names:
            mine = frozenset(prods.get(name, ()))
            seen = first.get(name)
            if seen is None:
                first[name] = (gid, mine)
            elif seen[1] != mine and (name, seen[0], gid) not in reported:
                reported.add((name, seen[0], gid))
                out.append(Violation("inconsistent", f"{name} between {seen[0]},{gid}"))
    ids = repo.ids
    pos = {gid: i for i, gid in enumerate(ids)}
    succ = [[pos[h] for h in repo.reused_by[g]] for g in ids]
    for comp in _tarjan(len(ids), succ):
        if len(comp) > 1:
            out.append(Violation("reuse cycle", ",".join(ids[i] for i in sorted(comp))))
    return out


def grammar_path_hash(path: str) -> Optional[str]:
    return _file_sha(path) if os.path.exists(path) else None
