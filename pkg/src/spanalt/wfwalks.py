"""Counting distinct well-formed label strings of s-t walks in edge-labeled graphs.

A label string is well formed when it derives from

    S -> ε | α S | ψ S ψ' S        (α neutral, (ψ, ψ') in oc)

The ``strict`` flag switches to the variant without the trailing ``S`` after
a closer, in which ``()a`` is not derivable.

Three routes compute the same count: a memoised set recursion that splits
each opener/closer pair into an interior and a suffix walk, an explicit
alternating machine built for the instance, and brute-force walk enumeration
filtered by CYK membership.
"""
from __future__ import annotations

import enum
import os
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .errors import ResourceError, ValidationError
from .grammar import Grammar, membership, to_cnf
from .machine import Machine, RunBounds, StateKind, Transition


def default_walk_cap() -> int:
    return int(os.environ.get("SPANALT_CAP_WALKS", 10**6))


@dataclass(frozen=True)
class LabeledGraph:
    """Directed multigraph; each edge is ``(source, target, label)`` with ``label=None`` for unlabeled edges."""

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        vertices = tuple(dict.fromkeys(self.vertices))
        edges = tuple((u, v, lab) for u, v, lab in self.edges)
        known = set(vertices)
        for u, v, _ in edges:
            if u not in known or v not in known:
                raise ValidationError(f"edge {u}->{v} uses an undeclared vertex")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    @property
    def labels(self) -> frozenset:
        return frozenset(lab for _, _, lab in self.edges if lab is not None)

    def out_edges(self, u) -> list:
        return [e for e in self.edges if e[0] == u]


@dataclass(frozen=True)
class OCRelation:
    pairs: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(tuple(p) for p in self.pairs))

    @property
    def labels(self) -> frozenset:
        return frozenset(x for p in self.pairs for x in p)

    def closers(self, label) -> list:
        return sorted(c for o, c in self.pairs if o == label)


def _oc(oc) -> OCRelation:
    return oc if isinstance(oc, OCRelation) else OCRelation(frozenset(oc))


@dataclass(frozen=True)
class WalkQuery:
    source: object
    target: object
    length: int


class LabelClass(str, enum.Enum):
    OPENING = "opening"
    CLOSING = "closing"
    NEUTRAL = "neutral"
    BOTH = "both"


def classify_label(label, oc) -> LabelClass:
    oc = _oc(oc)
    opens = any(o == label for o, _ in oc.pairs)
    closes = any(c == label for _, c in oc.pairs)
    if opens and closes:
        return LabelClass.BOTH
    if opens:
        return LabelClass.OPENING
    if closes:
        return LabelClass.CLOSING
    return LabelClass.NEUTRAL


# ---------------------------------------------------------------------------
# The well-formed language

def well_formed_grammar(labels: Iterable, oc, strict: bool = False) -> Grammar:
    oc = _oc(oc)
    alphabet = frozenset(labels) | oc.labels
    start = "S"
    while start in alphabet:
        start += "'"
    rules = [(start, ())]
    for a in sorted(alphabet):
        if classify_label(a, oc) is LabelClass.NEUTRAL:
            rules.append((start, (a, start)))
    for o, c in sorted(oc.pairs):
        rules.append((start, (o, start, c) if strict else (o, start, c, start)))
    return Grammar(frozenset({start}), alphabet, tuple(rules), start)


@lru_cache(maxsize=64)
def _wf_cnf(alphabet: frozenset, pairs: frozenset, strict: bool) -> Grammar:
    return to_cnf(well_formed_grammar(alphabet, OCRelation(pairs), strict))


def is_well_formed(w, labels: Iterable, oc, strict: bool = False) -> bool:
    """CYK membership of the label sequence ``w`` in the well-formed language."""
    oc = _oc(oc)
    alphabet = frozenset(labels) | oc.labels
    if any(a not in alphabet for a in w):
        return False
    return membership(_wf_cnf(alphabet, oc.pairs, strict), tuple(w))


# ---------------------------------------------------------------------------
# Set recursion

def _check_query(g: LabeledGraph, q: WalkQuery) -> None:
    for v in (q.source, q.target):
        if v not in g.vertices:
            raise ValidationError(f"unknown vertex {v!r}")
    if q.length < 0:
        raise ValidationError("walk length must be a natural number")


class _Recursion:
    """``WF(u, v, m)``: well-formed strings of u->v walks with exactly ``m`` edges."""

    def __init__(self, g: LabeledGraph, oc: OCRelation, strict: bool):
        self.g, self.oc, self.strict = g, oc, strict
        self.kind = {lab: classify_label(lab, oc) for lab in g.labels | oc.labels}
        self.by_label: dict = {}
        for e in g.edges:
            self.by_label.setdefault(e[2], []).append(e)
        self.memo: dict = {}

    def wf(self, u, v, m: int) -> frozenset:
        key = (u, v, m)
        if key in self.memo:
            return self.memo[key]
        if m == 0:
            result = frozenset({()}) if u == v else frozenset()
            self.memo[key] = result
            return result
        acc: set = set()
        for _, x, lab in self.g.out_edges(u):
            if lab is None:
                acc |= self.wf(x, v, m - 1)
            elif self.kind[lab] is LabelClass.NEUTRAL:
                acc |= {(lab,) + s for s in self.wf(x, v, m - 1)}
            elif self.kind[lab] in (LabelClass.OPENING, LabelClass.BOTH):
                for closer in self.oc.closers(lab):
                    for y, z, _ in self.by_label.get(closer, ()):
                        for inner_len in range(m - 1):
                            inner = self.wf(x, y, inner_len)
                            if not inner:
                                continue
                            rest = self.wf(z, v, m - inner_len - 2)
                            if self.strict:
                                rest = rest & {()}
                            for i in inner:
                                for s in rest:
                                    acc.add((lab,) + i + (closer,) + s)
        result = frozenset(acc)
        self.memo[key] = result
        return result


def wf_walk_strings(g: LabeledGraph, oc, q: WalkQuery, strict: bool = False) -> frozenset:
    _check_query(g, q)
    return _Recursion(g, _oc(oc), strict).wf(q.source, q.target, q.length)


def wf_walk_span(g: LabeledGraph, oc, q: WalkQuery, strict: bool = False) -> int:
    return len(wf_walk_strings(g, oc, q, strict))


def wf_walk_span_upto(g: LabeledGraph, oc, s, t, n: int, strict: bool = False) -> int:
    """Sum over lengths ``0..n``; strings are counted once per walk length that realises them."""
    _check_query(g, WalkQuery(s, t, n))
    rec = _Recursion(g, _oc(oc), strict)
    return sum(len(rec.wf(s, t, m)) for m in range(n + 1))


# ---------------------------------------------------------------------------
# Brute-force oracle

def _balanced(w: tuple, labels: tuple, slack: int) -> bool:
    counts = Counter(a for a in w if a in labels)
    values = [counts[a] for a in labels]
    return max(values) - min(values) <= slack


def oracle_wf_walks(g: LabeledGraph, oc, q: WalkQuery, cap: Optional[int] = None,
                    strict: bool = False, balanced: Optional[tuple] = None,
                    balance_slack: int = 0) -> int:
    """Enumerate s-t walks of length ``n``, keep well-formed label strings, count distinct ones.

    Walks are expanded edge by edge; partial walks with the same current
    vertex and label prefix are merged, and ``cap`` bounds the total number
    of stored (vertex, prefix) pairs.

    ``balanced`` optionally names labels whose occurrence counts must differ
    by at most ``balance_slack`` (a post-filter available only here).
    """
    _check_query(g, q)
    oc = _oc(oc)
    cap = default_walk_cap() if cap is None else cap
    alphabet = g.labels | oc.labels
    adjacency = {v: g.out_edges(v) for v in g.vertices}
    # walks sharing an endpoint and a label prefix extend identically, so keep one of each
    frontier = {(q.source, ())}
    stored = 1
    for _ in range(q.length):
        nxt = set()
        for u, w in frontier:
            for _, x, lab in adjacency[u]:
                nxt.add((x, w if lab is None else w + (lab,)))
        frontier = nxt
        stored += len(frontier)
        if stored > cap:
            raise ResourceError("walk enumeration", cap)
    strings = {w for u, w in frontier if u == q.target}
    good = {w for w in strings if is_well_formed(w, alphabet, oc, strict)}
    if balanced:
        good = {w for w in good if _balanced(w, tuple(balanced), balance_slack)}
    return len(good)


# ---------------------------------------------------------------------------
# Explicit machine

def build_wfwalks_machine(g: LabeledGraph, oc, q: WalkQuery, strict: bool = False):
    """An alternating machine whose span on the empty input equals :func:`wf_walk_span`.

    ``W[u>v:m]`` is existential and picks the first edge.  Every label is
    emitted on the step into a shared accept leaf, branched off by a binary
    universal node, so the output forest is a flat sequence of one-node
    trees spelling the label string.  An opener ``ψ`` with guessed closer
    edge ``y->z`` and interior length ``x`` expands as

        [leaf ψ, [W[u'>y:x], [leaf ψ', W[z>v:m-x-2]]]]

    In strict mode the suffix walk runs through ``Q`` states that may only
    use unlabeled edges.  Returns ``(machine, input, bounds)``.
    """
    _check_query(g, q)
    oc = _oc(oc)
    kind = {lab: classify_label(lab, oc) for lab in g.labels | oc.labels}
    by_label: dict = {}
    for e in g.edges:
        by_label.setdefault(e[2], []).append(e)
    blank = "_"
    leaf = "leaf"
    states: dict = {leaf: StateKind.ACCEPT}
    transitions: list = []
    pending: list = []

    def link(src: str, dst: str, out=None) -> None:
        transitions.append(Transition(src, blank, dst, blank, "S", out))

    def walk_state(prefix: str, u, v, m: int) -> str:
        name = f"{prefix}[{u}>{v}:{m}]"
        if name not in states:
            if m == 0:
                states[name] = StateKind.ACCEPT if u == v else StateKind.REJECT
            else:
                states[name] = StateKind.EXISTS
                pending.append((prefix, name, u, v, m))
        return name

    def forall(name: str, first, second) -> str:
        if name not in states:
            states[name] = StateKind.FORALL
            for dst, out in (first, second):
                link(name, dst, out)
        return name

    initial = walk_state("W", q.source, q.target, q.length)
    while pending:
        prefix, name, u, v, m = pending.pop()
        for i, (_, x, lab) in enumerate(g.out_edges(u)):
            if lab is None:
                link(name, walk_state(prefix, x, v, m - 1))
            elif prefix == "Q":
                continue
            elif kind[lab] is LabelClass.NEUTRAL:
                rest = walk_state("W", x, v, m - 1)
                link(name, forall(f"N[{u}-{lab}->{x}>{v}:{m}]", (leaf, lab), (rest, None)))
            elif kind[lab] in (LabelClass.OPENING, LabelClass.BOTH):
                for closer in oc.closers(lab):
                    for j, (y, z, _) in enumerate(by_label.get(closer, ())):
                        for inner_len in range(m - 1):
                            tag = f"{u}-{lab}->{x}|{y}-{closer}->{z}|{inner_len}>{v}:{m}"
                            inner = walk_state("W", x, y, inner_len)
                            suffix = walk_state("Q" if strict else "W", z, v, m - inner_len - 2)
                            u3 = forall(f"U3[{tag}]", (leaf, closer), (suffix, None))
                            u2 = forall(f"U2[{tag}]", (inner, None), (u3, None))
                            u1 = forall(f"U1[{tag}]", (leaf, lab), (u2, None))
                            link(name, u1)
    machine = Machine.build(states, transitions, initial)
    return machine, "", RunBounds(space=1, tree_size=4 * q.length + 1)


def forest_to_string(forest: tuple) -> tuple:
    """Label string spelled by a flat output forest of the walk machine."""
    if any(kids for _, kids in forest):
        raise ValidationError("walk machine outputs are flat forests")
    return tuple(label for label, _ in forest)
