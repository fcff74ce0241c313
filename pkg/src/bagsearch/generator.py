"""Seeded synthetic repositories of workflow grammars.

All randomness comes from numpy's PCG64 bit generator seeded explicitly;
unit-interval draws are ``integers(0, 2**53) / 2**53`` so corpora are
reproducible byte for byte.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields
from typing import Dict, List, Optional, Tuple

import numpy as np

from .grammar import ModuleDecl, Production, Grammar, serialize_grammar
from .repository import Repository, load_repository

_UNIT = float(2 ** 53)


@dataclass(frozen=True)
class GenParams:
    seed: int = 20120827
    n_grammars: int = 200
    max_modules_per_simple_workflow: int = 5
    p_composite: float = 0.6
    p_repeat: float = 0.4
    max_productions_per_module: int = 3
    p_recursive: float = 0.5
    max_reuse: int = 5
    p_reuse: float = 0.1
    max_depth: int = 3
    n_topics: int = 20
    keywords_per_topic: int = 20
    max_keywords_per_module: int = 3
    general_recursion: bool = False

    def validate(self) -> None:
        for name in ("p_composite", "p_repeat", "p_recursive", "p_reuse"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")
        for name in ("n_grammars", "max_modules_per_simple_workflow", "max_productions_per_module",
                     "n_topics", "keywords_per_topic", "max_depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        for name in ("max_reuse", "max_keywords_per_module"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "GenParams":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for line in text.splitlines():
            if "=" not in line:
                continue
            k, v = line.split("=", 1)
            t = types[k.strip()]
            if t in ("bool", bool):
                kw[k.strip()] = v.strip() == "True"
            elif t in ("int", int):
                kw[k.strip()] = int(v)
            else:
                kw[k.strip()] = float(v)
        return cls(**kw)


class _Rng:
    def __init__(self, seed: int):
        self.gen = np.random.Generator(np.random.PCG64(seed))

    def unit(self) -> float:
        return int(self.gen.integers(0, 2 ** 53)) / _UNIT

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return int(self.gen.integers(lo, hi + 1))

    def weighted(self, weights: List[float]) -> int:
        total = sum(weights)
        x = self.unit() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if x < acc:
                return i
        return len(weights) - 1

    def sample(self, n: int, k: int) -> List[int]:
        """k distinct indices from range(n), in draw order."""
        pool = list(range(n))
        out = []
        for _ in range(min(k, n)):
            out.append(pool.pop(self.randint(0, len(pool) - 1)))
        return out


Topic = List[Tuple[str, float]]


def make_topics(p: GenParams, rng: Optional[_Rng] = None) -> List[Topic]:
    """Zipf(s=1) keyword distributions, one per topic.

    Keyword ``t03k07`` is the eighth keyword of topic 3. Ranks are a seeded
    permutation, so each topic has a different most-likely keyword.
    """
    rng = rng or _Rng(p.seed)
    topics = []
    n = p.keywords_per_topic
    harmonic = sum(1.0 / r for r in range(1, n + 1))
    for t in range(p.n_topics):
        order = rng.sample(n, n)
        topic = [(f"t{t:02d}k{j:02d}", 1.0 / ((rank + 1) * harmonic)) for rank, j in enumerate(order)]
        topic.sort()
        topics.append(topic)
    return topics


class _GrammarBuilder:
    def __init__(self, gi: int, p: GenParams, rng: _Rng, topic: Topic):
        self.gi = gi
        self.p = p
        self.rng = rng
        self.topic = topic
        self.counter = 0
        self.modules: Dict[str, ModuleDecl] = {}
        self.prods: List[Production] = []
        self.composites: List[str] = []

    def keywords(self) -> Tuple[str, ...]:
        n = self.rng.randint(0, self.p.max_keywords_per_module)
        weights = [w for _, w in self.topic]
        names = [k for k, _ in self.topic]
        out: List[str] = []
        for _ in range(min(n, len(names))):
            i = self.rng.weighted(weights)
            out.append(names[i])
            weights = weights[:i] + weights[i + 1:]
            names = names[:i] + names[i + 1:]
        return tuple(out)

    def module(self, depth: int) -> str:
        name = f"g{self.gi:04d}_m{self.counter}"
        self.counter += 1
        composite = depth == 0 or (depth < self.p.max_depth and self.rng.unit() < self.p.p_composite)
        kws = self.keywords()
        self.modules[name] = ModuleDecl(name, not composite, kws)
        if not composite:
            return name
        self.composites.append(name)
        n_prod = self.rng.randint(1, self.p.max_productions_per_module)
        bodies = [self.workflow(depth + 1) for _ in range(n_prod)]
        if self.rng.unit() < self.p.p_recursive:
            if n_prod == 1:
                bodies.append(self.workflow(depth + 1))
            j = self.rng.randint(1, len(bodies) - 1)
            copies = 2 if self.p.general_recursion else 1
            bodies[j] = bodies[j] + [name] * copies
        for j, body in enumerate(bodies):
            self.prods.append(Production(f"{name}.r{j + 1}", name, tuple(body)))
        return name

    def workflow(self, depth: int) -> List[str]:
        body: List[str] = []
        for _ in range(self.rng.randint(1, self.p.max_modules_per_simple_workflow)):
            m = self.module(depth)
            times = self.rng.randint(2, 3) if self.rng.unit() < self.p.p_repeat else 1
            body.extend([m] * times)
        return body


def _uniform(prods: List[Production]) -> Tuple[Production, ...]:
    from fractions import Fraction
    count: Dict[str, int] = {}
    for pr in prods:
        count[pr.head] = count.get(pr.head, 0) + 1
    return tuple(Production(pr.label, pr.head, pr.body, Fraction(1, count[pr.head]))
                 for pr in prods)


def generate_grammars(p: GenParams) -> List[Grammar]:
    """Source-form grammars; later grammars may reuse earlier ones."""
    p.validate()
    rng = _Rng(p.seed)
    topics = make_topics(p, rng)
    out: List[Grammar] = []
    for gi in range(p.n_grammars):
        topic = topics[rng.weighted([1.0] * len(topics))]
        b = _GrammarBuilder(gi, p, rng, topic)
        start = b.module(0)
        reused: List[Grammar] = []
        if gi > 0 and p.max_reuse > 0 and rng.unit() < p.p_reuse:
            n = rng.randint(1, min(p.max_reuse, gi))
            reused = [out[i] for i in sorted(rng.sample(gi, n))]
        own_prods = list(b.prods)
        for r in reused:
            host = b.composites[rng.randint(0, len(b.composites) - 1)]
            idx = [i for i, pr in enumerate(own_prods) if pr.head == host]
            # any production of the host module may embed the reused start
            i = idx[rng.randint(0, len(idx) - 1)]
            pr = own_prods[i]
            own_prods[i] = Production(pr.label, pr.head, pr.body + (r.start,))
        modules: Dict[str, ModuleDecl] = {}
        prods: Dict[str, Production] = {}
        for r in reused:
            for m in r.modules:
                modules.setdefault(m.name, m)
            for pr in r.productions:
                prods.setdefault(pr.label, pr)
        for name, m in b.modules.items():
            modules[name] = m
        for pr in own_prods:
            prods[pr.label] = pr
        # own productions first, then inlined ones, both in creation order
        ordered = [pr for pr in own_prods] + [pr for lbl, pr in prods.items()
                                              if not lbl.startswith(f"g{gi:04d}_")]
        mods = [m for name, m in modules.items() if name.startswith(f"g{gi:04d}_")] + \
               [m for name, m in modules.items() if not name.startswith(f"g{gi:04d}_")]
        out.append(Grammar(f"g{gi:04d}", start, _uniform_from(ordered, reused), tuple(mods)))
    return out


def _uniform_from(prods: List[Production], reused: List[Grammar]) -> Tuple[Production, ...]:
    # inlined productions keep their stored probabilities
    keep = {pr.label: pr for r in reused for pr in r.productions}
    fresh = [pr for pr in prods if pr.label not in keep]
    fixed = {pr.label: pr for pr in _uniform(fresh)}
    return tuple(keep.get(pr.label) or fixed[pr.label] for pr in prods)


def write_repository(grammars: List[Grammar], p: GenParams, out_dir: str) -> str:
    """Write one file per grammar, a manifest, and gen-params.txt."""
    os.makedirs(out_dir, exist_ok=True)
    names = []
    for g in grammars:
        fname = f"{g.id}.bg"
        with open(os.path.join(out_dir, fname), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(serialize_grammar(g))
        names.append(fname)
    manifest = os.path.join(out_dir, "manifest.txt")
    with open(manifest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(n + "\n" for n in names))
    with open(os.path.join(out_dir, "gen-params.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(p.to_text())
    return manifest


def generate_repository(p: GenParams, out_dir: Optional[str] = None) -> Repository:
    grammars = generate_grammars(p)
    if out_dir is None:
        return Repository.from_grammars(grammars)
    return load_repository(write_repository(grammars, p, out_dir))
