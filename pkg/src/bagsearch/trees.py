"""Canonical unordered parse trees, path bags, and tree subsumption."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .grammar import Grammar, _BARE

Path = Tuple[str, ...]

# path terminator for branches that end in an epsilon production
EPSILON_END = ""


def _atom(name: str) -> str:
    if _BARE.fullmatch(name) and "(" not in name and ")" not in name:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


class ParseTree:
    """An unordered tree: interior nodes are production firings, leaves terminals.

    Children are kept sorted by their canonical serialization, so two trees are
    equal exactly when their serializations are.
    """

    __slots__ = ("label", "head", "children", "rho", "__dict__")

    def __init__(self, label: Optional[str], head: str,
                 children: Sequence["ParseTree"] = (), rho: Fraction = Fraction(1)):
        self.label = label
        self.head = head
        self.children = tuple(sorted(children, key=lambda c: c.key))
        self.rho = rho

    @classmethod
    def leaf(cls, terminal: str) -> "ParseTree":
        return cls(None, terminal)

    @classmethod
    def node(cls, g: Grammar, label: str, children: Sequence["ParseTree"]) -> "ParseTree":
        """Fire production ``label`` over ``children`` (checked against its body)."""
        p = g.by_label[label]
        if Counter(c.head for c in children) != Counter(p.body):
            raise ValueError(f"children of {label} do not match body {p.body}")
        rho = p.prob
        for c in children:
            rho *= c.rho
        return cls(label, p.head, children, rho)

    @property
    def is_leaf(self) -> bool:
        return self.label is None

    @cached_property
    def key(self) -> str:
        if self.label is None:
            return _atom(self.head)
        if not self.children:
            return f"({_atom(self.label)})"
        return "(" + _atom(self.label) + " " + " ".join(c.key for c in self.children) + ")"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ParseTree) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "ParseTree") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"ParseTree({self.key})"

    @cached_property
    def height(self) -> int:
        if self.label is None:
            return 0
        return 1 + max((c.height for c in self.children), default=0)

    @cached_property
    def leaves(self) -> Counter:
        if self.label is None:
            return Counter((self.head,))
        out: Counter = Counter()
        for c in self.children:
            out.update(c.leaves)
        return out

    @cached_property
    def paths(self) -> Tuple[Path, ...]:
        """Bag of root-to-leaf label sequences, each ending in its terminal."""
        if self.label is None:
            return ((self.head,),)
        if not self.children:
            return ((self.label, EPSILON_END),)
        out: List[Path] = []
        for c in self.children:
            out.extend((self.label,) + p for p in c.paths)
        return tuple(sorted(out))

    @cached_property
    def productions(self) -> Counter:
        out: Counter = Counter()
        if self.label is not None:
            out[self.label] += 1
            for c in self.children:
                out.update(c.productions)
        return out

    def subtrees(self) -> Iterable["ParseTree"]:
        yield self
        for c in self.children:
            yield from c.subtrees()

    def generated(self, keywords: Iterable[str]) -> frozenset:
        """The subset of ``keywords`` (terminal names) occurring among the leaves."""
        return frozenset(k for k in keywords if self.leaves.get(k))

    def ascii(self) -> str:
        """Indented drawing: interior nodes show label and head, leaves terminals."""
        lines: List[str] = []

        def walk(t: "ParseTree", prefix: str, last: bool, top: bool) -> None:
            text = t.head if t.label is None else f"{t.label}: {t.head}"
            if top:
                lines.append(text)
                child_prefix = ""
            else:
                lines.append(prefix + ("`-- " if last else "|-- ") + text)
                child_prefix = prefix + ("    " if last else "|   ")
            for i, c in enumerate(t.children):
                walk(c, child_prefix, i == len(t.children) - 1, False)

        walk(self, "", True, True)
        return "\n".join(lines)


def recompute_rho(g: Grammar, t: ParseTree) -> Fraction:
    """ρ(T) as the product over the tree's productions, independent of caching."""
    out = Fraction(1)
    for label, n in t.productions.items():
        out *= g.by_label[label].prob ** n
    return out


def parse_tree(g: Grammar, text: str) -> ParseTree:
    """Read a canonical serialization such as ``(r1 (r2 s1) (r4 a))``."""
    toks: List[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            toks.append(ch)
            i += 1
        elif ch == '"':
            j = i + 1
            buf = []
            while text[j] != '"':
                if text[j] == "\\":
                    j += 1
                buf.append(text[j])
                j += 1
            toks.append("\0" + "".join(buf))
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            toks.append(text[i:j])
            i = j
    pos = 0

    def name(tok: str) -> str:
        return tok[1:] if tok.startswith("\0") else tok

    def read() -> ParseTree:
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok != "(":
            return ParseTree.leaf(name(tok))
        label = name(toks[pos])
        pos += 1
        kids = []
        while toks[pos] != ")":
            kids.append(read())
        pos += 1
        return ParseTree.node(g, label, kids)

    t = read()
    if pos != len(toks):
        raise ValueError("trailing input after tree")
    return t


# ---------------------------------------------------------------- subsumption

def path_subsumes(p: Path, p2: Path) -> bool:
    """p ≺ p2: p is a subsequence of p2 (so both end at the same terminal)."""
    if not p or not p2 or p[-1] != p2[-1]:
        return False
    it = iter(p2[:-1])
    return all(any(x == y for y in it) for x in p[:-1])


def _kuhn(n_left: int, adj: List[List[int]], n_right: int) -> int:
    """Size of a maximum matching by unit-capacity augmenting paths."""
    match_right = [-1] * n_right

    def augment(u: int, seen: List[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_right[v] == -1 or augment(match_right[v], seen):
                    match_right[v] = u
                    return True
        return False

    return sum(1 for u in range(n_left) if augment(u, [False] * n_right))


def tree_subsumes(t: ParseTree, t2: ParseTree) -> bool:
    """T ≺ T2: same root head and an onto map paths(T2) -> paths(T) with p ≺ p'.

    Every path of T2 must subsume some path of T; then an onto map exists iff
    the bipartite graph admits a matching saturating paths(T), which is
    decided by max-flow with unit capacities.
    """
    if t.head != t2.head:
        return False
    small, big = t.paths, t2.paths
    if len(big) < len(small):
        return False
    if t.key == t2.key:
        return True
    distinct_small = sorted(set(small))
    distinct_big = sorted(set(big))
    memo: Dict[Tuple[Path, Path], bool] = {}
    for a in distinct_small:
        for b in distinct_big:
            memo[(a, b)] = path_subsumes(a, b)
    for b in distinct_big:
        if not any(memo[(a, b)] for a in distinct_small):
            return False
    # left: path instances of T; right: path instances of T2
    right_of: Dict[Path, List[int]] = {}
    for j, b in enumerate(big):
        right_of.setdefault(b, []).append(j)
    adj: List[List[int]] = []
    for a in small:
        row: List[int] = []
        for b in distinct_big:
            if memo[(a, b)]:
                row.extend(right_of[b])
        adj.append(row)
    return _kuhn(len(small), adj, len(big)) == len(small)


def strictly_subsumes(t: ParseTree, t2: ParseTree) -> bool:
    """T ≺ T2 with differing path bags."""
    return t.paths != t2.paths and tree_subsumes(t, t2)
