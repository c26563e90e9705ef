"""Alternating transducer machines: configurations, accepting trees, outputs and span.

A machine has a read-only two-way input tape (with endmarkers), one work tape
that grows to the right on demand, and a write-once output channel: every
transition carries either an output letter or ``NO_OUTPUT``.  The declaration
order of transitions is the child order used for universal states and for
output concatenation.

Two independent routes compute the same quantities:

* :func:`enumerate_accepting_trees` materialises every accepting computation
  tree within the bounds (the definitional route);
* :func:`span` / :func:`count_trees` run a memoised dynamic program over
  ``(configuration, tree size)`` that never builds trees.
"""
from __future__ import annotations

import enum
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional

from .errors import ValidationError

#: The no-output marker.  ``None`` can never collide with a letter (letters are strings).
NO_OUTPUT = None

LEFT_END = "⊢"
RIGHT_END = "⊣"

_MOVES = {"L": -1, "R": 1, "S": 0}

OutputSymbol = Optional[str]
Tree = tuple  # (label, Forest)
Forest = tuple  # tuple of Tree


class StateKind(str, enum.Enum):
    EXISTS = "exists"
    FORALL = "forall"
    ACCEPT = "accept"
    REJECT = "reject"

    @property
    def halting(self) -> bool:
        return self in (StateKind.ACCEPT, StateKind.REJECT)


@dataclass(frozen=True)
class Transition:
    """One entry of the transition relation.

    ``input`` optionally guards on the symbol under the input head (``None``
    matches anything); ``input_move`` moves that head.  Work-head moves are
    ``L``/``R`` plus ``S`` (stay), which auxiliary gadgets need.
    """

    source: str
    read: str
    target: str
    write: str
    move: str = "S"
    output: OutputSymbol = NO_OUTPUT
    input: Optional[str] = None
    input_move: str = "S"


@dataclass(frozen=True)
class Machine:
    states: dict
    input_alphabet: frozenset
    work_alphabet: frozenset
    output_alphabet: frozenset
    initial: str
    transitions: tuple
    blank: str = "_"
    auxiliary: frozenset = frozenset()
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        states = {q: StateKind(k) for q, k in dict(self.states).items()}
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "input_alphabet", frozenset(self.input_alphabet))
        object.__setattr__(self, "output_alphabet", frozenset(self.output_alphabet))
        object.__setattr__(
            self, "work_alphabet",
            frozenset(self.work_alphabet) | self.input_alphabet | {self.blank})
        object.__setattr__(self, "auxiliary", frozenset(self.auxiliary))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        self._validate()
        index: dict = {}
        for t in self.transitions:
            index.setdefault(t.source, []).append(t)
        self._index.update(index)

    def _validate(self) -> None:
        if self.initial not in self.states:
            raise ValidationError(f"initial state {self.initial!r} is not declared")
        if self.blank in self.input_alphabet:
            raise ValidationError("the blank symbol may not be an input letter")
        undeclared = self.auxiliary - self.states.keys()
        if undeclared:
            raise ValidationError(f"auxiliary states not declared: {sorted(undeclared)}")
        bad = [a for a in self.output_alphabet if not isinstance(a, str) or not a]
        if bad:
            raise ValidationError(f"output letters must be non-empty strings, got {bad!r}")
        input_symbols = self.input_alphabet | {LEFT_END, RIGHT_END}
        for i, t in enumerate(self.transitions):
            where = f"transition {i} ({t.source}->{t.target})"
            if t.source not in self.states or t.target not in self.states:
                raise ValidationError(f"{where}: undeclared state")
            if self.states[t.source].halting:
                raise ValidationError(f"{where}: transitions out of halting states are forbidden")
            if t.read not in self.work_alphabet or t.write not in self.work_alphabet:
                raise ValidationError(f"{where}: work symbol outside the work alphabet")
            if t.move not in _MOVES or t.input_move not in _MOVES:
                raise ValidationError(f"{where}: head moves must be one of L, R, S")
            if t.output is not NO_OUTPUT and t.output not in self.output_alphabet:
                raise ValidationError(f"{where}: output {t.output!r} outside the output alphabet")
            if t.input is not None and t.input not in input_symbols:
                raise ValidationError(f"{where}: input guard {t.input!r} is not an input symbol")

    @classmethod
    def build(cls, states, transitions, initial, input_alphabet=(), blank="_",
              auxiliary=(), work_alphabet=(), output_alphabet=()) -> "Machine":
        """Construct a machine, inferring work and output alphabets from the transitions."""
        transitions = tuple(transitions)
        work = set(work_alphabet) | {blank}
        outputs = set(output_alphabet)
        for t in transitions:
            work.update((t.read, t.write))
            if t.output is not NO_OUTPUT:
                outputs.add(t.output)
        return cls(dict(states), frozenset(input_alphabet), frozenset(work),
                   frozenset(outputs), initial, transitions, blank, frozenset(auxiliary))

    def kind(self, state: str) -> StateKind:
        return self.states[state]

    def transitions_from(self, state: str) -> list:
        return self._index.get(state, [])

    def is_auxiliary(self, state: str) -> bool:
        return state in self.auxiliary


class Configuration(NamedTuple):
    state: str
    tape: tuple
    head: int
    input_head: int


@dataclass(frozen=True)
class RunBounds:
    """Concrete resource budget for one run.

    ``tree_size=None`` means unbounded; that is only accepted when the
    reachable configuration graph is acyclic.  With ``principal_only`` the
    size budget counts only nodes whose state is not auxiliary.
    """

    space: int
    tree_size: Optional[int]
    principal_only: bool = False

    def __post_init__(self):
        if self.space < 1:
            raise ValidationError("space bound must be at least 1")
        if self.tree_size is not None and self.tree_size < 1:
            raise ValidationError("tree-size bound must be at least 1")


@dataclass(frozen=True)
class TreeNode:
    config: Configuration
    sigma: OutputSymbol
    children: tuple = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def walk(self) -> Iterator["TreeNode"]:
        yield self
        for c in self.children:
            yield from c.walk()


ComputationTree = TreeNode


def initial_configuration(machine: Machine, word: str) -> Configuration:
    return Configuration(machine.initial, (machine.blank,), 0, 0)


def input_symbol(word, position: int) -> str:
    if position == -1:
        return LEFT_END
    if position == len(word):
        return RIGHT_END
    return word[position]


def _check_config(machine: Machine, word, config: Configuration) -> None:
    if config.state not in machine.states:
        raise ValidationError(f"unknown state {config.state!r}")
    if not 0 <= config.head < len(config.tape):
        raise ValidationError(f"work head {config.head} outside tape of length {len(config.tape)}")
    if not -1 <= config.input_head <= len(word):
        raise ValidationError(f"input head {config.input_head} outside [-1, {len(word)}]")


def successors(machine: Machine, word, config: Configuration) -> list:
    """All one-step successors of ``config`` with their output symbols, in declaration order.

    A head that would leave its tape (work head left of cell 0, input head
    beyond an endmarker) stays where it is, so every matching transition
    yields exactly one successor.
    """
    _check_config(machine, word, config)
    if machine.kind(config.state).halting:
        return []
    cell = config.tape[config.head]
    under = input_symbol(word, config.input_head)
    result = []
    for t in machine.transitions_from(config.state):
        if t.read != cell or (t.input is not None and t.input != under):
            continue
        head = max(config.head + _MOVES[t.move], 0)
        ihead = min(max(config.input_head + _MOVES[t.input_move], -1), len(word))
        tape = config.tape[:config.head] + (t.write,) + config.tape[config.head + 1:]
        if head == len(tape):
            tape += (machine.blank,)
        result.append((Configuration(t.target, tape, head, ihead), t.output))
    return result


def _cost(machine: Machine, config: Configuration, bounds: RunBounds) -> int:
    return 0 if bounds.principal_only and config.state in machine.auxiliary else 1


def _children(machine: Machine, word, config: Configuration, bounds: RunBounds):
    """Successors relevant to tree building, or ``None`` if no tree can continue here.

    Existential states drop successors that exceed the space bound; a
    universal state with any such successor (or none at all) cannot be part
    of an accepting tree.
    """
    kind = machine.kind(config.state)
    if kind is StateKind.REJECT:
        return None
    if kind is StateKind.ACCEPT:
        return []
    succ = successors(machine, word, config)
    fits = [(c, s) for c, s in succ if len(c.tape) <= bounds.space]
    if kind is StateKind.FORALL:
        if not succ or len(fits) != len(succ):
            return None
        return fits
    # identical (configuration, output) choices give identical trees
    fits = list(dict.fromkeys(fits))
    return fits or None


# ---------------------------------------------------------------------------
# Enumeration (definitional route)

def enumerate_accepting_trees(machine: Machine, word, bounds: RunBounds) -> Iterator[TreeNode]:
    """Yield every accepting computation tree within ``bounds`` exactly once.

    Depth-first over existential choices; universal children are explored in
    declaration order, so the stream is deterministic.
    """
    root = initial_configuration(machine, word)
    budget = bounds.tree_size
    if budget is None:
        _require_acyclic(machine, word, bounds)
        budget = float("inf")
    on_path: set = set()

    def gen(config: Configuration, sigma, budget):
        cost = _cost(machine, config, bounds)
        if cost > budget:
            return
        key = (config, budget)
        if cost == 0:
            if key in on_path:
                raise ValidationError(
                    f"auxiliary cycle through {config.state!r}: infinitely many trees")
            on_path.add(key)
        try:
            kids = _children(machine, word, config, bounds)
            if kids is None:
                return
            if machine.kind(config.state) is StateKind.ACCEPT:
                yield TreeNode(config, sigma), cost
            elif machine.kind(config.state) is StateKind.EXISTS:
                for c, s in kids:
                    for child, used in gen(c, s, budget - cost):
                        yield TreeNode(config, sigma, (child,)), used + cost
            else:
                for combo, used in product(kids, budget - cost):
                    yield TreeNode(config, sigma, combo), used + cost
        finally:
            if cost == 0:
                on_path.discard(key)

    def product(kids, budget):
        if not kids:
            yield (), 0
            return
        (c, s), rest = kids[0], kids[1:]
        for first, used in gen(c, s, budget):
            for others, used_rest in product(rest, budget - used):
                yield (first,) + others, used + used_rest

    _raise_recursion_limit()
    for tree, _ in gen(root, NO_OUTPUT, budget):
        yield tree


def tree_measure(machine: Machine, tree: TreeNode, principal_only: bool = False) -> int:
    """Node count of ``tree``; with ``principal_only``, auxiliary-state nodes are skipped."""
    if not principal_only:
        return tree.size()
    return sum(1 for n in tree.walk() if n.config.state not in machine.auxiliary)


# ---------------------------------------------------------------------------
# Outputs

def out(tree: TreeNode) -> Forest:
    """Output forest of an accepting computation tree.

    A node without output returns the concatenation of its children's
    forests; a node with output ``a`` returns the single tree rooted at ``a``
    whose subtrees are that concatenation.
    """
    def node(u: TreeNode) -> Forest:
        collected: Forest = ()
        for v in u.children:
            collected += node(v)
        if u.sigma is NO_OUTPUT:
            return collected
        return ((u.sigma, collected),)

    return node(tree)


def forest_size(forest: Forest) -> int:
    return sum(1 + forest_size(children) for _, children in forest)


_ESCAPES = {"\\": "\\\\", "(": "\\(", ")": "\\)", ",": "\\,", ";": "\\;"}


def _escape(label: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in label)


def canonical_encoding(forest: Forest) -> str:
    """Serialise a forest as ``label(child,child)`` trees joined by ``;``.

    Special characters inside labels are backslash-escaped, which keeps the
    encoding injective.
    """
    def tree(t) -> str:
        label, children = t
        if not children:
            return _escape(label)
        return _escape(label) + "(" + ",".join(tree(c) for c in children) + ")"

    return ";".join(tree(t) for t in forest)


def forest(*trees) -> Forest:
    """Build a forest from nested ``(label, [children...])`` or bare-label arguments."""
    def build(t):
        if isinstance(t, str):
            return (t, ())
        label, kids = t
        return (label, tuple(build(k) for k in kids))

    return tuple(build(t) for t in trees)


# ---------------------------------------------------------------------------
# Dynamic programme (fast route)

def _raise_recursion_limit(limit: int = 20000) -> None:
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)


def _wrap(sigma: OutputSymbol, forests: Iterable[Forest]) -> set:
    if sigma is NO_OUTPUT:
        return set(forests)
    return {((sigma, f),) for f in forests}


class _Solver:
    """Memoised ``(configuration, exact measure)`` tables for outputs and tree counts."""

    def __init__(self, machine: Machine, word, bounds: RunBounds):
        self.machine = machine
        self.word = word
        self.bounds = bounds
        self._forests: dict = {}
        self._counts: dict = {}
        self._kids: dict = {}
        self._busy: set = set()
        _raise_recursion_limit()

    def kids(self, config):
        if config not in self._kids:
            self._kids[config] = _children(self.machine, self.word, config, self.bounds)
        return self._kids[config]

    def _enter(self, key):
        if key in self._busy:
            raise ValidationError(
                f"auxiliary cycle through {key[0].state!r}: infinitely many trees")
        self._busy.add(key)

    # -- sized tables ------------------------------------------------------
    def forests(self, config, size: int) -> frozenset:
        """Output forests (excluding the node's own label) of trees of exactly ``size``."""
        key = (config, size)
        hit = self._forests.get(key)
        if hit is not None:
            return hit
        self._enter(key)
        try:
            result = self._forests_uncached(config, size)
        finally:
            self._busy.discard(key)
        self._forests[key] = result
        return result

    def _forests_uncached(self, config, size):
        cost = _cost(self.machine, config, self.bounds)
        rest = size - cost
        kids = self.kids(config)
        if rest < 0 or kids is None:
            return frozenset()
        kind = self.machine.kind(config.state)
        if kind is StateKind.ACCEPT:
            return frozenset({()}) if rest == 0 else frozenset()
        if kind is StateKind.EXISTS:
            acc: set = set()
            for c, s in kids:
                acc |= _wrap(s, self.forests(c, rest))
            return frozenset(acc)
        partial = {0: {()}}
        for c, s in kids:
            nxt: dict = {}
            for used, prefixes in partial.items():
                for k in range(rest - used + 1):
                    tails = _wrap(s, self.forests(c, k))
                    if tails:
                        nxt.setdefault(used + k, set()).update(
                            p + t for p in prefixes for t in tails)
            partial = nxt
            if not partial:
                return frozenset()
        return frozenset(partial.get(rest, ()))

    def count(self, config, size: int) -> int:
        key = (config, size)
        hit = self._counts.get(key)
        if hit is not None:
            return hit
        self._enter(key)
        try:
            result = self._count_uncached(config, size)
        finally:
            self._busy.discard(key)
        self._counts[key] = result
        return result

    def _count_uncached(self, config, size):
        cost = _cost(self.machine, config, self.bounds)
        rest = size - cost
        kids = self.kids(config)
        if rest < 0 or kids is None:
            return 0
        kind = self.machine.kind(config.state)
        if kind is StateKind.ACCEPT:
            return 1 if rest == 0 else 0
        if kind is StateKind.EXISTS:
            return sum(self.count(c, rest) for c, _ in kids)
        partial = {0: 1}
        for c, _ in kids:
            nxt: dict = {}
            for used, ways in partial.items():
                for k in range(rest - used + 1):
                    n = self.count(c, k)
                    if n:
                        nxt[used + k] = nxt.get(used + k, 0) + ways * n
            partial = nxt
        return partial.get(rest, 0)

    # -- unbounded tables (acyclic configuration graphs only) -------------
    def all_forests(self, config) -> frozenset:
        key = (config, None)
        hit = self._forests.get(key)
        if hit is not None:
            return hit
        self._enter(key)
        try:
            kids = self.kids(config)
            kind = self.machine.kind(config.state)
            if kids is None:
                result = frozenset()
            elif kind is StateKind.ACCEPT:
                result = frozenset({()})
            elif kind is StateKind.EXISTS:
                acc: set = set()
                for c, s in kids:
                    acc |= _wrap(s, self.all_forests(c))
                result = frozenset(acc)
            else:
                prefixes = {()}
                for c, s in kids:
                    tails = _wrap(s, self.all_forests(c))
                    prefixes = {p + t for p in prefixes for t in tails}
                result = frozenset(prefixes)
        finally:
            self._busy.discard(key)
        self._forests[key] = result
        return result

    def all_count(self, config) -> int:
        key = (config, None)
        hit = self._counts.get(key)
        if hit is not None:
            return hit
        self._enter(key)
        try:
            kids = self.kids(config)
            kind = self.machine.kind(config.state)
            if kids is None:
                result = 0
            elif kind is StateKind.ACCEPT:
                result = 1
            elif kind is StateKind.EXISTS:
                result = sum(self.all_count(c) for c, _ in kids)
            else:
                result = 1
                for c, _ in kids:
                    result *= self.all_count(c)
        finally:
            self._busy.discard(key)
        self._counts[key] = result
        return result


def reachable_configurations(machine: Machine, word, space: int) -> list:
    """Configurations reachable from the initial one without exceeding ``space`` cells."""
    start = initial_configuration(machine, word)
    seen = {start: None}
    stack = [start]
    while stack:
        c = stack.pop()
        for nxt, _ in successors(machine, word, c):
            if len(nxt.tape) <= space and nxt not in seen:
                seen[nxt] = None
                stack.append(nxt)
    return list(seen)


def _require_acyclic(machine: Machine, word, bounds: RunBounds) -> None:
    configs = reachable_configurations(machine, word, bounds.space)
    colour = dict.fromkeys(configs, 0)
    for start in configs:
        if colour[start]:
            continue
        stack = [(start, iter(successors(machine, word, start)))]
        colour[start] = 1
        while stack:
            node, it = stack[-1]
            for nxt, _ in it:
                if len(nxt.tape) > bounds.space:
                    continue
                if colour[nxt] == 1:
                    raise ValidationError(
                        "unbounded tree size needs an acyclic configuration graph; "
                        f"cycle through state {nxt.state!r}")
                if colour[nxt] == 0:
                    colour[nxt] = 1
                    stack.append((nxt, iter(successors(machine, word, nxt))))
                    break
            else:
                colour[node] = 2
                stack.pop()


def output_set(machine: Machine, word, bounds: RunBounds) -> frozenset:
    """The set of distinct output forests of accepting trees within ``bounds``."""
    solver = _Solver(machine, word, bounds)
    root = initial_configuration(machine, word)
    if bounds.tree_size is None:
        _require_acyclic(machine, word, bounds)
        return solver.all_forests(root)
    acc: set = set()
    for size in range(bounds.tree_size + 1):
        acc |= solver.forests(root, size)
    return frozenset(acc)


def span(machine: Machine, word, bounds: RunBounds) -> int:
    """Number of distinct output forests over accepting trees within ``bounds``."""
    return len(output_set(machine, word, bounds))


def count_trees(machine: Machine, word, bounds: RunBounds) -> int:
    """Number of accepting computation trees within ``bounds`` (no deduplication)."""
    solver = _Solver(machine, word, bounds)
    root = initial_configuration(machine, word)
    if bounds.tree_size is None:
        _require_acyclic(machine, word, bounds)
        return solver.all_count(root)
    return sum(solver.count(root, size) for size in range(bounds.tree_size + 1))


def span_by_enumeration(machine: Machine, word, bounds: RunBounds) -> int:
    """Span computed by streaming canonical encodings of every enumerated tree's output."""
    seen = set()
    for tree in enumerate_accepting_trees(machine, word, bounds):
        seen.add(canonical_encoding(out(tree)))
    return len(seen)
