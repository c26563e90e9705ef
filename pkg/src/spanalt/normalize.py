"""Normal forms for alternating transducers: binary universal branching and a node budget.

Both transformations mark the states they introduce as *auxiliary*.  Size
budgets that count only principal (non-auxiliary) nodes are then preserved
exactly, which is what makes the span identities testable:

    span(M, Z) == span(binarize(M), Z, principal_only)
               == span(enforce_budget(binarize(M), Z), unbounded)
"""
from __future__ import annotations

from dataclasses import replace

from .errors import ValidationError
from .machine import (LEFT_END, NO_OUTPUT, RIGHT_END, Machine, StateKind,
                      Transition)


def _read_keys(machine: Machine, state: str) -> list:
    """The (work symbol, input symbol) combinations that select transitions of ``state``.

    Input symbols are only distinguished when some transition of the state
    guards on the input; otherwise the input component is ``None``.
    """
    ts = machine.transitions_from(state)
    work = sorted(machine.work_alphabet)
    if any(t.input is not None for t in ts):
        inputs = sorted(machine.input_alphabet) + [LEFT_END, RIGHT_END]
        return [(g, a) for g in work for a in inputs]
    return [(g, None) for g in work]


def _applicable(machine: Machine, state: str, key) -> list:
    gamma, a = key
    return [t for t in machine.transitions_from(state)
            if t.read == gamma and (a is None or t.input is None or t.input == a)]


def _pin(t: Transition, key) -> Transition:
    return t if key[1] is None else replace(t, input=key[1])


def _link(source: str, target: str, key) -> Transition:
    gamma, a = key
    return Transition(source, gamma, target, gamma, "S", NO_OUTPUT, a, "S")


class _Names:
    def __init__(self, taken):
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        name, i = base, 1
        while name in self.taken:
            i += 1
            name = f"{base}#{i}"
        self.taken.add(name)
        return name


def is_binarized(machine: Machine) -> bool:
    """True iff every universal state has 0 or exactly 2 transitions per read combination."""
    for q, kind in machine.states.items():
        if kind is StateKind.FORALL:
            for key in _read_keys(machine, q):
                if len(_applicable(machine, q, key)) not in (0, 2):
                    return False
    return True


def binarize(machine: Machine) -> Machine:
    """Rewrite universal branching so every universal state branches exactly twice.

    Per universal state and read combination with ``k`` applicable transitions:
    ``k == 1`` becomes existential, ``k >= 3`` becomes a cascade of fresh
    auxiliary universal states linked by no-output, stay-in-place transitions.
    A universal state with no transitions at all becomes a reject state (a
    universal configuration without successors already rejects).  When a
    state mixes arity 1 with arity >= 2, it turns into an existential
    dispatcher whose wider combinations enter an auxiliary cascade.
    """
    names = _Names(machine.states)
    states = dict(machine.states)
    auxiliary = set(machine.auxiliary)
    new_transitions: list = []

    for q in machine.states:
        ts = machine.transitions_from(q)
        if machine.kind(q) is not StateKind.FORALL:
            new_transitions.extend(ts)
            continue
        groups = [(key, _applicable(machine, q, key)) for key in _read_keys(machine, q)]
        groups = [(key, g) for key, g in groups if g]
        arities = {len(g) for _, g in groups}
        if not groups:
            states[q] = StateKind.REJECT
        elif arities == {2}:
            new_transitions.extend(ts)
        elif arities == {1}:
            states[q] = StateKind.EXISTS
            new_transitions.extend(ts)
        elif 1 not in arities:
            for key, g in groups:
                if len(g) == 2:
                    new_transitions.extend(_pin(t, key) for t in g)
                else:
                    _cascade_from(q, key, g, names, states, auxiliary, new_transitions)
        else:
            states[q] = StateKind.EXISTS
            for key, g in groups:
                if len(g) == 1:
                    new_transitions.append(_pin(g[0], key))
                    continue
                head = names.fresh(f"{q}/{key[0]}{'' if key[1] is None else '/' + key[1]}")
                states[head] = StateKind.FORALL
                auxiliary.add(head)
                new_transitions.append(_link(q, head, key))
                _cascade_from(head, key, [replace(t, source=head) for t in g],
                              names, states, auxiliary, new_transitions)

    return Machine(states, machine.input_alphabet, machine.work_alphabet,
                   machine.output_alphabet, machine.initial, tuple(new_transitions),
                   machine.blank, frozenset(auxiliary))


def _cascade_from(first, key, ts, names, states, auxiliary, out) -> None:
    """Emit a right-leaning chain of binary universal states starting at ``first``."""
    current = first
    for i, t in enumerate(ts[:-2]):
        nxt = names.fresh(f"{first}/{key[0]}{'' if key[1] is None else '/' + key[1]}/{i + 1}")
        states[nxt] = StateKind.FORALL
        auxiliary.add(nxt)
        out.append(replace(_pin(t, key), source=current))
        out.append(_link(current, nxt, key))
        current = nxt
    for t in ts[-2:]:
        out.append(replace(_pin(t, key), source=current))


def safe_tree_cap(budget: int) -> int:
    """Tree-size cap that no accepting tree of ``enforce_budget(binarize(M), budget)`` exceeds."""
    return 4 * budget * (budget.bit_length() + 2)


def enforce_budget(machine: Machine, budget: int) -> Machine:
    """Add a principal-node counter so accepting trees beyond ``budget`` principal nodes vanish.

    The new machine first guesses a budget ``1 <= b <= budget`` bit by bit,
    then simulates ``machine`` with the remaining counter kept in the control
    state.  Each principal node decrements the counter (rejecting when it is
    already 0), universal nodes guess how to split the counter between their
    two children (most significant bit first) and accept states accept iff
    the counter has reached exactly 0.
    """
    if budget < 1:
        raise ValidationError("budget must be at least 1")
    if not is_binarized(machine):
        raise ValidationError("enforce_budget needs a binarized machine; run binarize first")

    names = _Names(())
    states: dict = {}
    auxiliary: set = set()
    transitions: list = []
    pending: list = []
    sim_names: dict = {}

    def sim(q: str, c: int) -> str:
        key = ("sim", q, c)
        if key not in sim_names:
            name = names.fresh(f"{q}@{c}")
            sim_names[key] = name
            pending.append((q, c, name))
            if machine.is_auxiliary(q):
                auxiliary.add(name)
        return sim_names[key]

    def aux(name: str, kind: StateKind) -> str:
        states[name] = kind
        auxiliary.add(name)
        return name

    # initial budget guess
    nbits = budget.bit_length()
    blank = machine.blank
    guess: dict = {}

    def guess_state(i: int, v: int) -> str:
        if (i, v) not in guess:
            guess[(i, v)] = aux(names.fresh(f"budget?{i}:{v}"), StateKind.EXISTS)
            for b in (0, 1):
                value = 2 * v + b
                if i + 1 == nbits:
                    if 1 <= value <= budget:
                        transitions.append(Transition(guess[(i, v)], blank, sim(machine.initial, value), blank))
                elif value <= budget >> (nbits - i - 1):
                    transitions.append(Transition(guess[(i, v)], blank, guess_state(i + 1, value), blank))
        return guess[(i, v)]

    initial = guess_state(0, 0)

    while pending:
        q, c, name = pending.pop()
        kind = machine.kind(q)
        dec = 0 if machine.is_auxiliary(q) else 1
        if c < dec or kind is StateKind.REJECT:
            states[name] = StateKind.REJECT
            continue
        left = c - dec
        if kind is StateKind.ACCEPT:
            states[name] = StateKind.ACCEPT if left == 0 else StateKind.REJECT
        elif kind is StateKind.EXISTS:
            states[name] = StateKind.EXISTS
            for t in machine.transitions_from(q):
                transitions.append(replace(t, source=name, target=sim(t.target, left)))
        else:
            states[name] = StateKind.EXISTS
            for key in _read_keys(machine, q):
                pair = _applicable(machine, q, key)
                if pair:
                    _split_chain(name, q, key, pair, left, names, aux, sim, transitions)

    return Machine(states, machine.input_alphabet, machine.work_alphabet,
                   machine.output_alphabet, initial, tuple(transitions),
                   machine.blank, frozenset(auxiliary))


def _split_chain(entry, q, key, pair, left, names, aux, sim, transitions) -> None:
    """Existentially guess ``c1 <= left`` bit by bit, then branch universally on (c1, left - c1)."""
    sb = left.bit_length()
    tag = f"{q}/{key[0]}{'' if key[1] is None else '/' + key[1]}"
    branches: dict = {}

    def branch(c1: int) -> str:
        if c1 not in branches:
            u = aux(names.fresh(f"{tag}|{c1}+{left - c1}"), StateKind.FORALL)
            branches[c1] = u
            t1, t2 = pair
            transitions.append(replace(_pin(t1, key), source=u, target=sim(t1.target, c1)))
            transitions.append(replace(_pin(t2, key), source=u, target=sim(t2.target, left - c1)))
        return branches[c1]

    def step(source: str, i: int, v: int) -> None:
        for b in (0, 1):
            value = 2 * v + b
            if value > left >> (sb - i - 1):
                continue
            if i + 1 == sb:
                transitions.append(_link(source, branch(value), key))
            else:
                nxt = aux(names.fresh(f"{tag}|split{left}:{i + 1}:{value}"), StateKind.EXISTS)
                transitions.append(_link(source, nxt, key))
                step(nxt, i + 1, value)

    if sb == 0:
        transitions.append(_link(entry, branch(0), key))
    else:
        step(entry, 0, 0)
