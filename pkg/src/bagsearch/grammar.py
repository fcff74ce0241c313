"""Bag grammar data model, file format, and structural analyses."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

NON_RECURSIVE = "non_recursive"
LINEAR_RECURSIVE = "linear_recursive"
GENERAL_RECURSIVE = "general_recursive"

PROB_TOLERANCE = 1e-9
DEFAULT_DISTANCE_BUDGET = 10_000_000
KW_PREFIX = "kw:"


class GrammarError(Exception):
    """Raised for malformed or inconsistent grammars."""


class GrammarSyntaxError(GrammarError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class DistanceBudgetExceeded(GrammarError):
    """The simple-derivation search visited more states than allowed."""


class Symbol(NamedTuple):
    id: int
    name: str
    is_terminal: bool


@dataclass(frozen=True)
class Production:
    label: str
    head: str
    body: Tuple[str, ...]
    prob: Fraction = Fraction(1)
    explicit_prob: bool = field(default=False, compare=False)

    @property
    def prob_float(self) -> float:
        return float(self.prob)


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    atomic: bool = False
    keywords: Tuple[str, ...] = ()


class Violation(NamedTuple):
    kind: str
    subject: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.subject}"


class Indexed:
    """Integer-interned view of a grammar used by the evaluation kernels."""

    def __init__(self, g: "Grammar"):
        names: List[str] = []
        index: Dict[str, int] = {}

        def intern(name: str) -> int:
            i = index.get(name)
            if i is None:
                i = index[name] = len(names)
                names.append(name)
            return i

        intern(g.start)
        heads = set()
        for p in g.productions:
            heads.add(p.head)
            intern(p.head)
            for s in p.body:
                intern(s)
        self.names = names
        self.index = index
        self.n = len(names)
        self.start = index[g.start]
        self.is_terminal = [name not in heads for name in names]
        self.labels = [p.label for p in g.productions]
        self.heads = [index[p.head] for p in g.productions]
        self.bodies = [tuple(index[s] for s in p.body) for p in g.productions]
        self.probs = [p.prob_float for p in g.productions]
        self.fracs = [p.prob for p in g.productions]
        self.prods_of: List[List[int]] = [[] for _ in names]
        for r, h in enumerate(self.heads):
            self.prods_of[h].append(r)
        self.children: List[List[int]] = [[] for _ in names]
        for v in range(self.n):
            seen = set()
            for r in self.prods_of[v]:
                for s in self.bodies[r]:
                    if s not in seen:
                        seen.add(s)
                        self.children[v].append(s)
        self.terminals = [i for i in range(self.n) if self.is_terminal[i]]
        self.variables = [i for i in range(self.n) if not self.is_terminal[i]]


@dataclass(frozen=True, eq=False)
class Grammar:
    """A bag grammar: start symbol plus an ordered list of labeled productions.

    In source form ``modules`` carries the module declarations (atomic flag and
    keyword annotations). After :func:`compile_keywords` it is empty and every
    keyword is an ordinary terminal.
    """

    id: str
    start: str
    productions: Tuple[Production, ...]
    modules: Tuple[ModuleDecl, ...] = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grammar):
            return NotImplemented
        return (self.id, self.start, self.productions, self.modules) == (
            other.id, other.start, other.productions, other.modules)

    def __hash__(self) -> int:
        return hash((self.id, self.start, self.productions, self.modules))

    @cached_property
    def ix(self) -> Indexed:
        return Indexed(self)

    @property
    def is_compiled(self) -> bool:
        return not self.modules

    @property
    def size(self) -> int:
        return sum(1 + len(p.body) for p in self.productions)

    @cached_property
    def heads(self) -> frozenset:
        return frozenset(p.head for p in self.productions)

    @cached_property
    def variables(self) -> Tuple[str, ...]:
        return tuple(n for n in self.ix.names if n in self.heads)

    @cached_property
    def terminals(self) -> Tuple[str, ...]:
        return tuple(n for n in self.ix.names if n not in self.heads)

    @property
    def symbols(self) -> Tuple[Symbol, ...]:
        ix = self.ix
        return tuple(Symbol(i, n, ix.is_terminal[i]) for i, n in enumerate(ix.names))

    @cached_property
    def by_label(self) -> Dict[str, Production]:
        return {p.label: p for p in self.productions}

    def productions_of(self, head: str) -> List[Production]:
        return [p for p in self.productions if p.head == head]

    @cached_property
    def keywords(self) -> Dict[str, str]:
        """Map keyword -> terminal symbol carrying it."""
        out: Dict[str, str] = {}
        for t in self.terminals:
            out.setdefault(keyword_of(t), t)
        return out

    def terminal_for(self, keyword: str) -> Optional[str]:
        return self.keywords.get(keyword)

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(serialize_grammar(self).encode("utf-8")).hexdigest()


def keyword_of(terminal: str) -> str:
    return terminal[len(KW_PREFIX):] if terminal.startswith(KW_PREFIX) else terminal


# ---------------------------------------------------------------- file format

_TOKEN = re.compile(r'\s*(?:(?P<q>"(?:[^"\\]|\\.)*")|(?P<w>[^\s";]+)|(?P<semi>;))')
_BARE = re.compile(r"[A-Za-z0-9_.:\-@!#$%&*+/<>?^|~'=]+")


def _tokenize(line: str, lineno: int) -> List[Tuple[str, str, int]]:
    """Split one line into (kind, text, col) tokens; comments already removed."""
    toks = []
    pos = 0
    while pos < len(line):
        if line[pos:].strip() == "":
            break
        m = _TOKEN.match(line, pos)
        if m is None:
            col = pos + 1 + (len(line[pos:]) - len(line[pos:].lstrip()))
            raise GrammarSyntaxError("unterminated quoted symbol", lineno, col)
        col = m.start(m.lastgroup) + 1
        if m.group("q") is not None:
            raw = m.group("q")[1:-1]
            toks.append(("name", re.sub(r"\\(.)", r"\1", raw), col))
        elif m.group("semi") is not None:
            toks.append(("semi", ";", col))
        else:
            toks.append(("word", m.group("w"), col))
        pos = m.end()
    return toks


def _strip_comment(line: str) -> str:
    in_quote = False
    escaped = False
    for i, ch in enumerate(line):
        if escaped:
            escaped = False
        elif ch == "\\" and in_quote:
            escaped = True
        elif ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            if i == 0 or line[i - 1].isspace():
                return line[:i]
    return line


def _parse_prob(text: str, lineno: int, col: int) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise GrammarSyntaxError(f"bad probability {text!r}", lineno, col) from None
    if not (0 < value <= 1):
        raise GrammarSyntaxError(f"probability {text} outside (0,1]", lineno, col)
    return value


def parse_grammar(text: str) -> Grammar:
    """Parse a grammar file. The result is in source form (module annotations kept)."""
    gid: Optional[str] = None
    start: Optional[str] = None
    modules: Dict[str, ModuleDecl] = {}
    raw_prods: List[Tuple[str, str, Tuple[str, ...], Optional[Fraction], int]] = []
    labels_seen: Dict[str, int] = {}

    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokenize(_strip_comment(line), lineno)
        if not toks:
            continue
        kind, word, col = toks[0]
        if kind != "word":
            raise GrammarSyntaxError("expected a directive", lineno, col)

        def name_at(i: int, what: str) -> str:
            if i >= len(toks) or toks[i][0] == "semi":
                c = toks[i][2] if i < len(toks) else len(line) + 1
                raise GrammarSyntaxError(f"expected {what}", lineno, c)
            return toks[i][1]

        if word == "grammar":
            gid = name_at(1, "grammar id")
            if len(toks) > 2:
                raise GrammarSyntaxError("unexpected token", lineno, toks[2][2])
        elif word == "start":
            start = name_at(1, "start module")
            if len(toks) > 2:
                raise GrammarSyntaxError("unexpected token", lineno, toks[2][2])
        elif word == "module":
            name = name_at(1, "module name")
            atomic = False
            kws: List[str] = []
            i = 2
            if i < len(toks) and toks[i][0] == "word" and toks[i][1] == "atomic":
                atomic = True
                i += 1
            if i < len(toks):
                if toks[i][0] == "word" and toks[i][1] == "kw":
                    i += 1
                    while i < len(toks):
                        if toks[i][0] == "semi":
                            raise GrammarSyntaxError("unexpected ';'", lineno, toks[i][2])
                        kws.append(toks[i][1])
                        i += 1
                else:
                    raise GrammarSyntaxError("expected 'atomic' or 'kw'", lineno, toks[i][2])
            if name in modules:
                raise GrammarSyntaxError(f"module {name} declared twice", lineno, toks[1][2])
            modules[name] = ModuleDecl(name, atomic, tuple(kws))
        elif word == "prod":
            if len(toks) < 2 or toks[1][0] == "semi":
                raise GrammarSyntaxError("expected production label", lineno, col)
            label_tok = toks[1]
            label = label_tok[1]
            i = 2
            if label.endswith(":") and label_tok[0] == "word":
                label = label[:-1]
            elif i < len(toks) and toks[i][1] == ":":
                i += 1
            else:
                raise GrammarSyntaxError("expected ':' after label", lineno, label_tok[2])
            if not label:
                raise GrammarSyntaxError("empty production label", lineno, label_tok[2])
            head = name_at(i, "production head")
            i += 1
            if i >= len(toks) or toks[i][1] != "->" or toks[i][0] != "word":
                c = toks[i][2] if i < len(toks) else len(line) + 1
                raise GrammarSyntaxError("expected '->'", lineno, c)
            i += 1
            body: List[str] = []
            while i < len(toks) and toks[i][0] != "semi":
                body.append(toks[i][1])
                i += 1
            if i >= len(toks):
                raise GrammarSyntaxError("missing ';' after production body", lineno, len(line) + 1)
            i += 1
            prob: Optional[Fraction] = None
            if i < len(toks):
                t = toks[i]
                if t[0] != "word" or not t[1].startswith("p="):
                    raise GrammarSyntaxError("expected p=<probability>", lineno, t[2])
                prob = _parse_prob(t[1][2:], lineno, t[2] + 2)
                i += 1
            if i < len(toks):
                raise GrammarSyntaxError("unexpected token", lineno, toks[i][2])
            if label in labels_seen:
                raise GrammarSyntaxError(
                    f"duplicate production label {label} (first on line {labels_seen[label]})",
                    lineno, label_tok[2])
            labels_seen[label] = lineno
            raw_prods.append((label, head, tuple(body), prob, lineno))
        else:
            raise GrammarSyntaxError(f"unknown directive {word!r}", lineno, col)

    if gid is None:
        raise GrammarSyntaxError("missing 'grammar <id>' line", 1, 1)
    if start is None:
        raise GrammarSyntaxError("missing 'start <Module>' line", 1, 1)

    for label, head, _, _, lineno in raw_prods:
        if head in modules and modules[head].atomic:
            raise GrammarError(f"line {lineno}: atomic module {head} used as head of {label}")
    by_head: Dict[str, List[int]] = {}
    for i, (_, head, _, _, _) in enumerate(raw_prods):
        by_head.setdefault(head, []).append(i)
    probs: List[Fraction] = [Fraction(0)] * len(raw_prods)
    for head, idxs in by_head.items():
        given = [raw_prods[i][3] for i in idxs if raw_prods[i][3] is not None]
        missing = [i for i in idxs if raw_prods[i][3] is None]
        rest = 1 - sum(given, Fraction(0))
        if missing:
            if rest <= 0:
                raise GrammarError(f"probabilities of {head} leave no mass for unannotated productions")
            share = rest / len(missing)
            for i in missing:
                probs[i] = share
        for i in idxs:
            if raw_prods[i][3] is not None:
                probs[i] = raw_prods[i][3]
        total = sum(probs[i] for i in idxs)
        if abs(float(total) - 1.0) > PROB_TOLERANCE:
            raise GrammarError(f"probabilities of {head} sum to {float(total)!r}, not 1")
    prods = tuple(
        Production(label, head, body, probs[i], prob is not None)
        for i, (label, head, body, prob, _) in enumerate(raw_prods))
    return Grammar(gid, start, prods, tuple(modules.values()))


def _quote(name: str) -> str:
    if (_BARE.fullmatch(name) and name != "->" and not name.startswith(("p=", "#"))
            and not name.endswith(":")):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_grammar(g: Grammar) -> str:
    """Canonical text form; ``parse_grammar`` of the output reproduces ``g``."""
    lines = [f"grammar {_quote(g.id)}", f"start {_quote(g.start)}"]
    for m in g.modules:
        parts = ["module", _quote(m.name)]
        if m.atomic:
            parts.append("atomic")
        if m.keywords:
            parts.append("kw")
            parts.extend('"' + k.replace("\\", "\\\\").replace('"', '\\"') + '"' for k in m.keywords)
        lines.append(" ".join(parts))
    for p in g.productions:
        body = " ".join(_quote(s) for s in p.body)
        text = f"prod {_quote(p.label)}: {_quote(p.head)} -> {body} ;" if body else \
            f"prod {_quote(p.label)}: {_quote(p.head)} -> ;"
        if p.explicit_prob:
            text += f" p={_format_prob(p.prob)}"
        lines.append(text)
    return "\n".join(lines) + "\n"


def _format_prob(x: Fraction) -> str:
    """Shortest exact decimal when one exists, otherwise ``n/d``."""
    twos = fives = 0
    d = x.denominator
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    scaled = x.numerator * 10 ** digits // x.denominator
    if digits == 0:
        return str(scaled)
    s = str(scaled).rjust(digits + 1, "0")
    return s[:-digits] + "." + s[-digits:]


def load_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


# ---------------------------------------------------------------- compilation

def compile_keywords(g: Grammar) -> Grammar:
    """Turn module keyword annotations into terminals.

    Tagged composite modules get their keywords appended to every production
    body; atomic modules become variables with a single production emitting
    their keywords (or nothing). A keyword that clashes with a module name is
    renamed ``kw:<keyword>``. Already compiled grammars are returned unchanged.
    """
    if g.is_compiled:
        return g
    module_names = {m.name for m in g.modules}
    heads = {p.head for p in g.productions}
    decls = {m.name: m for m in g.modules}
    for m in g.modules:
        if not m.atomic and m.name not in heads:
            raise GrammarError(f"composite module {m.name} has no productions")

    def term(k: str) -> str:
        if k in module_names or k in heads or k.startswith(KW_PREFIX):
            return KW_PREFIX + k
        return k

    labels = {p.label for p in g.productions}
    prods: List[Production] = []
    for p in g.productions:
        m = decls.get(p.head)
        extra = tuple(term(k) for k in m.keywords) if m is not None else ()
        prods.append(Production(p.label, p.head, p.body + extra, p.prob, p.explicit_prob))
    for m in g.modules:
        if not m.atomic:
            continue
        label = f"atom:{m.name}"
        while label in labels:
            label += "'"
        labels.add(label)
        prods.append(Production(label, m.name, tuple(term(k) for k in m.keywords), Fraction(1)))
    return Grammar(g.id, g.start, tuple(prods), ())


# ---------------------------------------------------------------- properness

def validate_proper(g: Grammar) -> List[Violation]:
    """Underivable symbols and unproductive variables, in first-appearance order."""
    ix = g.ix
    reach = [False] * ix.n
    reach[ix.start] = True
    stack = [ix.start]
    while stack:
        v = stack.pop()
        for c in ix.children[v]:
            if not reach[c]:
                reach[c] = True
                stack.append(c)
    productive = list(ix.is_terminal)
    pending = [len(b) for b in ix.bodies]
    users: List[List[int]] = [[] for _ in range(ix.n)]
    for r, body in enumerate(ix.bodies):
        for s in body:
            users[s].append(r)
    queue = [t for t in range(ix.n) if productive[t]]
    for r, body in enumerate(ix.bodies):
        if not body and not productive[ix.heads[r]]:
            productive[ix.heads[r]] = True
            queue.append(ix.heads[r])
    while queue:
        s = queue.pop()
        for r in users[s]:
            pending[r] -= 1
            if pending[r] == 0 and not productive[ix.heads[r]]:
                productive[ix.heads[r]] = True
                queue.append(ix.heads[r])
    out: List[Violation] = []
    for i, name in enumerate(ix.names):
        if not reach[i]:
            out.append(Violation("underivable", name))
    for i, name in enumerate(ix.names):
        if not productive[i]:
            out.append(Violation("unproductive", name))
    for m in g.modules:
        if m.atomic and m.name not in ix.index:
            out.append(Violation("underivable", m.name))
    return out


# ---------------------------------------------------------------- SCC order

@dataclass(frozen=True)
class SccOrder:
    classes: Tuple[Tuple[str, ...], ...]
    class_of: Mapping[str, int]
    recursive: Tuple[bool, ...]

    def __iter__(self):
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)


def _tarjan(n: int, succ: Sequence[Sequence[int]]) -> List[List[int]]:
    """Iterative Tarjan; SCCs come out sinks first."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: List[int] = []
    out: List[List[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    comp.sort()
                    out.append(comp)
    return out


def scc_index_order(g: Grammar) -> Tuple[List[List[int]], List[int], List[bool]]:
    """SCC classes over interned ids, dependencies first."""
    cached = g.__dict__.get("_scc_ix")
    if cached is not None:
        return cached
    ix = g.ix
    comps = _tarjan(ix.n, ix.children)
    class_of = [0] * ix.n
    for ci, comp in enumerate(comps):
        for v in comp:
            class_of[v] = ci
    recursive = []
    for comp in comps:
        rec = len(comp) > 1 or comp[0] in ix.children[comp[0]]
        recursive.append(rec)
    result = (comps, class_of, recursive)
    object.__setattr__(g, "_scc_ix", result)
    return result


def scc_order(g: Grammar) -> SccOrder:
    comps, _, recursive = scc_index_order(g)
    names = g.ix.names
    classes = tuple(tuple(names[v] for v in comp) for comp in comps)
    class_of = {name: ci for ci, cls in enumerate(classes) for name in cls}
    return SccOrder(classes, class_of, tuple(recursive))


# ---------------------------------------------------------------- distance

class _DistanceSolver:
    """Longest simple production sequences.

    A production sequence moves from production r to r' when head(r') occurs
    in body(r). A simple sequence never leaves and re-enters a strongly
    connected component of this production graph, so the search is exhaustive
    inside each component and dynamic programming across components.
    """

    def __init__(self, g: Grammar, budget: int):
        ix = g.ix
        self.ix = ix
        self.budget = budget
        self.visited = 0
        nr = len(ix.heads)
        succ = []
        for r in range(nr):
            nxt = []
            seen = set()
            for s in ix.bodies[r]:
                if s in seen:
                    continue
                seen.add(s)
                nxt.extend(ix.prods_of[s])
            succ.append(nxt)
        self.succ = succ
        comps = _tarjan(nr, succ)
        self.comps = comps
        self.comp_of = [0] * nr
        for ci, comp in enumerate(comps):
            for r in comp:
                self.comp_of[r] = ci

    def longest_from(self, accept: Sequence[bool]) -> List[Optional[int]]:
        """For each production r, the longest simple sequence starting at r
        whose last production satisfies ``accept``; None when there is none."""
        best: List[Optional[int]] = [None] * len(self.succ)
        for comp in self.comps:  # sinks first
            members = set(comp)
            exit_val: Dict[int, Optional[int]] = {}
            for r in comp:
                v = 0 if accept[r] else None
                for r2 in self.succ[r]:
                    if r2 not in members and best[r2] is not None:
                        if v is None or best[r2] > v:
                            v = best[r2]
                exit_val[r] = v
            if len(comp) == 1 and comp[0] not in self.succ[comp[0]]:
                r = comp[0]
                best[r] = None if exit_val[r] is None else exit_val[r] + 1
                continue
            for r in comp:
                best[r] = self._search(r, members, exit_val)
        return best

    def _search(self, start: int, members: set, exit_val: Dict[int, Optional[int]]) -> Optional[int]:
        result: Optional[int] = None
        fired = {start}
        stack = [(start, 1, iter([r for r in self.succ[start] if r in members]))]
        ev = exit_val[start]
        if ev is not None:
            result = 1 + ev
        while stack:
            r, length, it = stack[-1]
            advanced = False
            for r2 in it:
                if r2 in fired:
                    continue
                self.visited += 1
                if self.visited > self.budget:
                    raise DistanceBudgetExceeded(
                        f"distance search exceeded {self.budget} visited states")
                fired.add(r2)
                ev = exit_val[r2]
                if ev is not None and (result is None or length + 1 + ev > result):
                    result = length + 1 + ev
                stack.append((r2, length + 1, iter([x for x in self.succ[r2] if x in members])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                fired.discard(r)
        return result


def distance(g: Grammar, budget: int = DEFAULT_DISTANCE_BUDGET) -> int:
    """d(G): the longest simple derivation sequence between any two symbols."""
    key = ("_distance", budget)
    cached = g.__dict__.get("_distance_cache")
    if cached is not None and key in cached:
        return cached[key]
    solver = _DistanceSolver(g, budget)
    accept = [len(b) > 0 for b in g.ix.bodies]
    best = solver.longest_from(accept)
    d = max((b for b in best if b is not None), default=0)
    if cached is None:
        cached = {}
        object.__setattr__(g, "_distance_cache", cached)
    cached[key] = d
    return d


def distance_between(g: Grammar, a: str, b: str,
                     budget: int = DEFAULT_DISTANCE_BUDGET) -> Optional[int]:
    """d(A↦B), or None when A does not derive B."""
    ix = g.ix
    if a not in ix.index or b not in ix.index:
        return None
    ai, bi = ix.index[a], ix.index[b]
    solver = _DistanceSolver(g, budget)
    accept = [bi in body for body in ix.bodies]
    best = solver.longest_from(accept)
    vals = [best[r] for r in ix.prods_of[ai] if best[r] is not None]
    return max(vals) if vals else None


def iteration_bound(g: Grammar, n_keywords: int) -> int:
    """Fixpoint round cap: d(G)(|Q|+1)+|Q|, at least d(G)+1.

    The extra round covers epsilon productions, whose trees are one level
    taller than the longest simple sequence. When the distance search blows
    its budget, |R| (an upper bound on d(G)) is used instead.
    """
    try:
        d = distance(g)
    except DistanceBudgetExceeded:
        d = len(g.productions)
    return max(d * (n_keywords + 1) + n_keywords, d + 1)


# ---------------------------------------------------------------- recursion

def _derives(ix: Indexed) -> List[set]:
    """For each symbol, the set of symbols reachable in one or more steps."""
    comps = _tarjan(ix.n, ix.children)
    reach: List[set] = [set() for _ in range(ix.n)]
    for comp in comps:
        acc: set = set()
        members = set(comp)
        for v in comp:
            for c in ix.children[v]:
                acc.add(c)
                if c not in members:
                    acc |= reach[c]
        cyclic = len(comp) > 1 or comp[0] in ix.children[comp[0]]
        if cyclic:
            acc |= members
        for v in comp:
            reach[v] = acc
    return reach


def recursion_class(g: Grammar) -> str:
    ix = g.ix
    _, _, recursive = scc_index_order(g)
    if not any(recursive):
        return NON_RECURSIVE
    reach = _derives(ix)
    for r, body in enumerate(ix.bodies):
        head = ix.heads[r]
        count = sum(1 for s in body if s == head or head in reach[s])
        if count > 1:
            return GENERAL_RECURSIVE
    return LINEAR_RECURSIVE


def precedence_edges(g: Grammar) -> Iterable[Tuple[str, str]]:
    ix = g.ix
    for v in range(ix.n):
        for c in ix.children[v]:
            yield ix.names[v], ix.names[c]
