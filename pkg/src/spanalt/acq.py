"""Counting answers of acyclic conjunctive queries as the span of a join-tree evaluator.

Each join-tree node guesses a tuple of its relation consistent with the
bindings inherited from its parent, emits that tuple with every non-free
position masked by ``STAR``, and recurses universally into its children.
Two assignments that agree on the free variables produce the same output
forest, so the number of distinct forests is the number of answers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .errors import ValidationError
from .machine import Machine, StateKind, Transition


class _Star:
    """Masked position in an emitted tuple.  Never equal to any constant."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "★"

    def __reduce__(self):
        return (_Star, ())


STAR = _Star()


@dataclass(frozen=True)
class Database:
    relations: dict

    def __post_init__(self):
        rels = {}
        for name, tuples in dict(self.relations).items():
            ts = frozenset(tuple(t) for t in tuples)
            arities = {len(t) for t in ts}
            if len(arities) > 1:
                raise ValidationError(f"relation {name!r} mixes arities {sorted(arities)}")
            rels[name] = ts
        object.__setattr__(self, "relations", rels)

    def tuples(self, name: str) -> list:
        return sorted(self.relations.get(name, ()))


@dataclass(frozen=True)
class ConjunctiveQuery:
    free: tuple
    atoms: tuple

    def __post_init__(self):
        atoms = tuple((name, tuple(vs)) for name, vs in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "free", tuple(self.free))
        if not atoms:
            raise ValidationError("a query needs at least one atom")
        used = {v for _, vs in atoms for v in vs}
        missing = [v for v in self.free if v not in used]
        if missing:
            raise ValidationError(f"free variables {missing} occur in no atom")

    @property
    def variables(self) -> list:
        return sorted({v for _, vs in self.atoms for v in vs})


@dataclass(frozen=True)
class JoinTree:
    """Rooted tree over atom indices; children are ordered by atom index."""

    root: int
    parent: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "parent", {int(c): int(p) for c, p in dict(self.parent).items()})

    def children(self, node: int) -> list:
        return sorted(c for c, p in self.parent.items() if p == node)

    def nodes(self) -> list:
        return sorted({self.root} | set(self.parent) | set(self.parent.values()))


def join_tree_problem(q: ConjunctiveQuery, t: JoinTree) -> Optional[str]:
    """Why ``t`` is not a join tree of ``q``, or ``None`` if it is one."""
    n = len(q.atoms)
    if t.root in t.parent:
        return f"root {t.root} has a parent"
    if t.nodes() != list(range(n)):
        return f"tree nodes {t.nodes()} do not match atom indices 0..{n - 1}"
    for node in t.parent:
        seen = set()
        cur = node
        while cur != t.root:
            if cur in seen or cur not in t.parent:
                return f"node {node} does not reach the root"
            seen.add(cur)
            cur = t.parent[cur]
    for v in q.variables:
        holders = {i for i, (_, vs) in enumerate(q.atoms) if v in vs}
        # connected iff exactly one holder has its parent outside the holder set
        tops = [i for i in holders if i == t.root or t.parent[i] not in holders]
        if len(tops) != 1:
            return f"the atoms containing variable {v!r} ({sorted(holders)}) are not connected"
    return None


def validate_join_tree(q: ConjunctiveQuery, t: JoinTree) -> bool:
    return join_tree_problem(q, t) is None


def _require_tree(q: ConjunctiveQuery, t: JoinTree) -> None:
    problem = join_tree_problem(q, t)
    if problem:
        raise ValidationError(f"invalid join tree: {problem}")


def gyo_join_tree(q: ConjunctiveQuery) -> JoinTree:
    """A join tree by ear removal; raises ``ValidationError`` for cyclic queries."""
    alive = list(range(len(q.atoms)))
    parent = {}
    vars_of = [set(vs) for _, vs in q.atoms]
    while len(alive) > 1:
        for e in alive:
            others = [f for f in alive if f != e]
            shared = vars_of[e] & set().union(*(vars_of[f] for f in others))
            witness = next((f for f in others if shared <= vars_of[f]), None)
            if witness is not None:
                parent[e] = witness
                alive.remove(e)
                break
        else:
            raise ValidationError("query is not acyclic (ear removal got stuck)")
    return JoinTree(alive[0], parent)


def _bind(vs: tuple, values: tuple, theta: dict) -> Optional[dict]:
    """Bindings of ``vs`` to ``values`` if consistent with ``theta`` and with repeated variables."""
    local: dict = {}
    for v, a in zip(vs, values):
        if theta.get(v, a) != a or local.get(v, a) != a:
            return None
        local[v] = a
    return local


def _mask(vs: tuple, values: tuple, free: set) -> tuple:
    return tuple(a if v in free else STAR for v, a in zip(vs, values))


def acq_outputs(q: ConjunctiveQuery, d: Database, t: JoinTree) -> frozenset:
    """Every output forest of the evaluator (each forest is a single join-tree-shaped tree)."""
    _require_tree(q, t)
    free = set(q.free)
    memo: dict = {}

    def eval_node(node: int, theta: dict) -> frozenset:
        name, vs = q.atoms[node]
        key = (node, tuple(sorted((v, a) for v, a in theta.items() if v in vs)))
        if key in memo:
            return memo[key]
        trees = set()
        for values in d.tuples(name):
            if len(values) != len(vs):
                raise ValidationError(
                    f"atom {name}{vs} has arity {len(vs)} but the relation has arity {len(values)}")
            local = _bind(vs, values, theta)
            if local is None:
                continue
            child_sets = [eval_node(c, local) for c in t.children(node)]
            label = _mask(vs, values, free)
            for combo in product(*child_sets):
                trees.add((label, combo))
        memo[key] = frozenset(trees)
        return memo[key]

    return frozenset((tree,) for tree in eval_node(t.root, {}))


def acq_span(q: ConjunctiveQuery, d: Database, t: JoinTree) -> int:
    return len(acq_outputs(q, d, t))


def oracle_count_answers(q: ConjunctiveQuery, d: Database) -> int:
    """Number of distinct projections onto the free variables of all consistent assignments."""
    answers = set()

    def extend(i: int, theta: dict) -> None:
        if i == len(q.atoms):
            answers.add(tuple(theta[v] for v in q.free))
            return
        name, vs = q.atoms[i]
        for values in d.relations.get(name, ()):
            if len(values) != len(vs):
                continue
            local = _bind(vs, values, theta)
            if local is not None:
                extend(i + 1, {**theta, **local})

    extend(0, {})
    return len(answers)


def acq_output_forest(q: ConjunctiveQuery, d: Database, t: JoinTree, assignment: dict) -> tuple:
    """The output forest produced for one full consistent ``assignment``."""
    _require_tree(q, t)
    free = set(q.free)
    for i, (name, vs) in enumerate(q.atoms):
        if any(v not in assignment for v in vs):
            raise ValidationError(f"assignment misses variables of atom {i}")
        if tuple(assignment[v] for v in vs) not in d.relations.get(name, ()):
            raise ValidationError(f"assignment is inconsistent with relation {name!r}")

    def tree(node: int):
        _, vs = q.atoms[node]
        values = tuple(assignment[v] for v in vs)
        return (_mask(vs, values, free), tuple(tree(c) for c in t.children(node)))

    return (tree(t.root),)


def label_text(label: tuple) -> str:
    """Printable form of an emitted tuple; constants containing ``★`` or ``\\`` are escaped."""
    def one(a) -> str:
        if a is STAR:
            return "★"
        return str(a).replace("\\", "\\\\").replace("★", "\\★").replace(",", "\\,")
    return "(" + ",".join(one(a) for a in label) + ")"


def text_forest(forest: tuple) -> tuple:
    """Replace tuple labels by their printable form (so forests compare with machine outputs)."""
    return tuple((label_text(lbl), text_forest(kids)) for lbl, kids in forest)


def build_acq_machine(q: ConjunctiveQuery, d: Database, t: JoinTree):
    """Explicit machine for tiny instances; its span equals :func:`acq_span`.

    ``E`` states guess a tuple (emitting its masked text) and move to a
    universal ``V`` state that branches silently into the children.
    Returns ``(machine, input, bounds)``.
    """
    from .machine import RunBounds

    _require_tree(q, t)
    free = set(q.free)
    blank = "_"
    states: dict = {}
    transitions: list = []

    def e_state(node: int, theta: dict) -> str:
        _, vs = q.atoms[node]
        inherited = tuple(sorted((v, a) for v, a in theta.items() if v in vs))
        q_name = f"E{node}{inherited}"
        if q_name in states:
            return q_name
        states[q_name] = StateKind.EXISTS
        name = q.atoms[node][0]
        for values in d.tuples(name):
            local = _bind(vs, values, theta) if len(values) == len(vs) else None
            if local is None:
                continue
            target = v_state(node, values, local)
            transitions.append(Transition(q_name, blank, target, blank, "S",
                                          label_text(_mask(vs, values, free))))
        return q_name

    def v_state(node: int, values: tuple, local: dict) -> str:
        q_name = f"V{node}{values}"
        if q_name in states:
            return q_name
        kids = t.children(node)
        states[q_name] = StateKind.FORALL if kids else StateKind.ACCEPT
        for c in kids:
            transitions.append(Transition(q_name, blank, e_state(c, local), blank))
        return q_name

    initial = e_state(t.root, {})
    machine = Machine.build(states, transitions, initial)
    return machine, "", RunBounds(space=1, tree_size=2 * len(q.atoms) + 1)
