"""Bridges between machines and grammars.

``compile_to_cfg`` turns the reachable configuration graph of a binarized
machine into a grammar whose words spell output forests with ``⟨``/``⟩``
markers.  ``cnfg_to_atrm`` goes the other way: a machine whose accepting
trees mirror the derivation trees of a CNF grammar for words of length k.
"""
from __future__ import annotations

from .errors import ValidationError
from .grammar import Grammar, is_cnf
from .machine import (NO_OUTPUT, Machine, RunBounds, StateKind, Transition,
                      initial_configuration, successors)
from .normalize import is_binarized

OPEN = "⟨"
CLOSE = "⟩"


def outwrap(symbol: str, sigma) -> tuple:
    """The body fragment for a child: bare when it emits nothing, bracketed with its letter otherwise."""
    if sigma is NO_OUTPUT:
        return (symbol,)
    return (OPEN, sigma, symbol, CLOSE)


def compile_to_cfg(machine: Machine, word, bounds: RunBounds) -> Grammar:
    """Grammar with one nonterminal per reachable configuration (within ``bounds.space``).

    Existential configurations get one rule per successor, universal ones a
    single rule concatenating both wrapped successors in declaration order,
    accepting ones ``C -> ε``.  Universal configurations with a successor
    beyond the space bound get no rule, matching the tree semantics.
    """
    if not is_binarized(machine):
        raise ValidationError(
            "compile_to_cfg needs a binarized machine; run `spanalt machine normalize` "
            "(or normalize.binarize) first")
    if {OPEN, CLOSE} & machine.output_alphabet:
        raise ValidationError(f"output letters {OPEN!r} and {CLOSE!r} are reserved as markers")

    root = initial_configuration(machine, word)
    names: dict = {}
    taken = set(machine.output_alphabet) | {OPEN, CLOSE}
    stack = []

    def name(config) -> str:
        if config not in names:
            base = f"C{len(names)}"
            label = base
            while label in taken:
                label += "'"
            taken.add(label)
            names[config] = label
            stack.append(config)
        return names[config]

    name(root)
    rules = []
    while stack:
        config = stack.pop()
        head = names[config]
        kind = machine.kind(config.state)
        if kind is StateKind.ACCEPT:
            rules.append((head, ()))
            continue
        if kind is StateKind.REJECT:
            continue
        succ = successors(machine, word, config)
        fits = [(c, s) for c, s in succ if len(c.tape) <= bounds.space]
        if kind is StateKind.EXISTS:
            for c, s in fits:
                rules.append((head, outwrap(name(c), s)))
        elif succ:
            if len(succ) != 2:
                raise ValidationError(
                    f"universal configuration in state {config.state!r} has {len(succ)} successors")
            if len(fits) == 2:
                (c1, s1), (c2, s2) = fits
                rules.append((head, outwrap(name(c1), s1) + outwrap(name(c2), s2)))
    return Grammar(frozenset(names.values()),
                   frozenset(machine.output_alphabet) | {OPEN, CLOSE},
                   tuple(rules), names[root])


def decode_word(word) -> tuple:
    """Inverse of the marker encoding: a compiled-grammar word back to an output forest."""
    pos = 0

    def parse_forest():
        nonlocal pos
        trees = []
        while pos < len(word) and word[pos] == OPEN:
            label = word[pos + 1]
            pos += 2
            kids = parse_forest()
            if pos >= len(word) or word[pos] != CLOSE:
                raise ValidationError(f"unbalanced marker word at position {pos}")
            pos += 1
            trees.append((label, kids))
        return tuple(trees)

    result = parse_forest()
    if pos != len(word):
        raise ValidationError(f"unexpected symbol {word[pos]!r} at position {pos}")
    return result


def cnfg_tree_budget(k: int) -> int:
    return 4 * k + 4


def cnfg_to_atrm(g_cnf: Grammar, k: int):
    """Machine whose accepting trees on input ``1^k`` mirror derivation trees of length-k words.

    State ``T[X,m]`` (existential) guesses a rule for ``X``: a terminal rule
    is allowed only when ``m == 1`` and emits its letter on the step into
    the accept state; a binary rule ``X -> B C`` also guesses ``1 <= m1 < m``
    and enters universal ``U[B,C,m1,m-m1]`` which branches silently into
    ``T[B,m1]`` and ``T[C,m-m1]``.  Returns ``(machine, input, bounds)``.
    """
    if not is_cnf(g_cnf):
        raise ValidationError("cnfg_to_atrm needs a grammar in Chomsky normal form")
    if k < 0:
        raise ValidationError("k must be a natural number")
    word = "1" * k
    bounds = RunBounds(space=1, tree_size=cnfg_tree_budget(k))
    blank = "_"
    if k == 0:
        kind = StateKind.ACCEPT if (g_cnf.start, ()) in g_cnf.rules else StateKind.REJECT
        machine = Machine.build({"T[0]": kind}, (), "T[0]", input_alphabet="1",
                                output_alphabet=g_cnf.terminals)
        return machine, word, bounds

    states = {"accept": StateKind.ACCEPT}
    transitions = []
    pending = []

    def t_state(x: str, m: int) -> str:
        q = f"T[{x},{m}]"
        if q not in states:
            states[q] = StateKind.EXISTS
            pending.append((q, x, m))
        return q

    def u_state(b: str, c: str, m1: int, m2: int) -> str:
        q = f"U[{b},{c},{m1},{m2}]"
        if q not in states:
            states[q] = StateKind.FORALL
            transitions.append(Transition(q, blank, t_state(b, m1), blank))
            transitions.append(Transition(q, blank, t_state(c, m2), blank))
        return q

    initial = t_state(g_cnf.start, k)
    while pending:
        q, x, m = pending.pop(0)
        for body in g_cnf.rules_for(x):
            if len(body) == 1 and m == 1:
                transitions.append(Transition(q, blank, "accept", blank, "S", body[0]))
            elif len(body) == 2:
                for m1 in range(1, m):
                    transitions.append(Transition(q, blank, u_state(body[0], body[1], m1, m - m1), blank))
    machine = Machine.build(states, transitions, initial, input_alphabet="1",
                            output_alphabet=g_cnf.terminals)
    return machine, word, bounds
