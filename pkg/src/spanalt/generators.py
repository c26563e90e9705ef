"""Seeded random instance generators used by cross-checks and benchmarks."""
from __future__ import annotations

import random
from typing import Optional

from .machine import NO_OUTPUT, Machine, StateKind, Transition


def random_machine(rng: random.Random, n_states: int = 5, work: str = "_1",
                   outputs: str = "ab", max_fanout: int = 3,
                   universal_share: float = 0.35) -> Machine:
    """A small machine over work letters ``work`` (first letter is the blank).

    State 0 is the initial state.  At least one accept state exists and
    universal states regularly get three or more transitions on a symbol so
    that binarization has something to do.
    """
    names = [f"q{i}" for i in range(n_states)]
    kinds = {}
    for i, q in enumerate(names):
        if i == n_states - 1:
            kinds[q] = StateKind.ACCEPT
        elif i == 0:
            kinds[q] = rng.choice([StateKind.EXISTS, StateKind.FORALL])
        else:
            r = rng.random()
            if r < universal_share:
                kinds[q] = StateKind.FORALL
            elif r < 0.72:
                kinds[q] = StateKind.EXISTS
            elif r < 0.95:
                kinds[q] = StateKind.ACCEPT
            else:
                kinds[q] = StateKind.REJECT
    letters = list(outputs) + [NO_OUTPUT, NO_OUTPUT]
    transitions = []
    for q in names:
        if kinds[q] in (StateKind.ACCEPT, StateKind.REJECT):
            continue
        for g in work:
            if g != work[0] and rng.random() < 0.25:
                continue
            for _ in range(rng.randint(1, max_fanout)):
                transitions.append(Transition(
                    q, g, rng.choice(names), rng.choice(work),
                    rng.choice("LRS"), rng.choice(letters)))
    return Machine.build(kinds, transitions, names[0], blank=work[0],
                         work_alphabet=work, output_alphabet=outputs)


def random_cnf_grammar(rng: random.Random, n_nonterminals: int = 4,
                       terminals: str = "ab", n_rules: Optional[int] = None,
                       epsilon: Optional[bool] = None):
    """A random grammar in Chomsky normal form over nonterminals ``S, A, B, ...``."""
    from .grammar import Grammar

    nts = ["S"] + [chr(ord("A") + i) for i in range(n_nonterminals - 1)]
    rhs_nts = nts[1:] if len(nts) > 1 else []
    n_rules = n_rules if n_rules is not None else rng.randint(n_nonterminals, 3 * n_nonterminals)
    rules = []
    for nt in nts:
        rules.append((nt, (rng.choice(terminals),)))
    for _ in range(n_rules):
        head = rng.choice(nts)
        if rhs_nts and rng.random() < 0.6:
            rules.append((head, (rng.choice(rhs_nts), rng.choice(rhs_nts))))
        else:
            rules.append((head, (rng.choice(terminals),)))
    use_eps = rng.random() < 0.3 if epsilon is None else epsilon
    if use_eps:
        rules.append(("S", ()))
    return Grammar.from_rules(rules, "S", terminals=set(terminals))


def random_graph(rng: random.Random, n_vertices: int = 4, n_edges: int = 6,
                 labels=("a", "(", ")"), unlabeled_share: float = 0.15):
    from .wfwalks import LabeledGraph

    vertices = [f"v{i}" for i in range(n_vertices)]
    edges = []
    for _ in range(n_edges):
        label = None if rng.random() < unlabeled_share else rng.choice(labels)
        edges.append((rng.choice(vertices), rng.choice(vertices), label))
    return LabeledGraph(tuple(vertices), tuple(edges))


def random_acq_instance(rng: random.Random, n_atoms: int = 3, max_tuples: int = 20,
                        constants: str = "abc"):
    """A random acyclic query with a valid rooted join tree and a database."""
    from .acq import ConjunctiveQuery, Database, JoinTree

    variables = ["x", "y", "z", "w", "u"]
    atoms = []
    parent = {}
    used: list = []
    for i in range(n_atoms):
        arity = rng.randint(1, 3)
        if i == 0:
            vs = [rng.choice(variables) for _ in range(arity)]
        else:
            p = rng.randrange(i)
            parent[i] = p
            shared = [v for v in atoms[p][1]]
            fresh = [v for v in variables if v not in used]
            vs = []
            for _ in range(arity):
                if shared and rng.random() < 0.5:
                    vs.append(rng.choice(shared))
                elif fresh:
                    vs.append(rng.choice(fresh))
                else:
                    vs.append(rng.choice(shared or variables))
        used.extend(v for v in vs if v not in used)
        atoms.append((f"R{i}", tuple(vs)))
    all_vars = sorted(set(v for _, vs in atoms for v in vs))
    free = tuple(v for v in all_vars if rng.random() < 0.5)
    relations = {}
    for name, vs in atoms:
        k = len(vs)
        relations[name] = {tuple(rng.choice(constants) for _ in range(k))
                           for _ in range(rng.randint(0, max_tuples))}
    query = ConjunctiveQuery(free, tuple(atoms))
    tree = JoinTree(0, parent)
    return query, Database(relations), tree
