"""JSON file formats for machines, grammars, graphs, oc relations, databases, queries and join trees.

Every document is an object with a versioned ``"format"`` field, for example
``"spanalt.machine/1"``.  Syntax errors report line and column; schema
errors report the JSON path of the offending value.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .acq import ConjunctiveQuery, Database, JoinTree
from .errors import FormatError, ValidationError
from .grammar import Grammar
from .machine import Machine, StateKind, Transition
from .wfwalks import LabeledGraph, OCRelation

FORMATS = ("machine", "grammar", "graph", "oc", "database", "query", "jointree")


def format_tag(kind: str) -> str:
    return f"spanalt.{kind}/1"


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class _Doc:
    """Tiny schema helper: typed access to JSON values with path-aware errors."""

    def __init__(self, source: str):
        self.source = source

    def fail(self, path: str, message: str):
        raise FormatError(f"{path}: {message}", self.source)

    def get(self, obj: dict, key: str, path: str, kind=None, default: Any = ...):
        if key not in obj:
            if default is ...:
                self.fail(path, f"missing key {key!r}")
            return default
        value = obj[key]
        if kind is not None and not isinstance(value, kind):
            names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
            self.fail(f"{path}.{key}", f"expected {names}, got {type(value).__name__}")
        return value


def _parse_text(text: str, source: str, kind: str) -> tuple:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, source, exc.lineno, exc.colno) from None
    doc = _Doc(source)
    if not isinstance(data, dict):
        doc.fail("$", "top level must be an object")
    tag = doc.get(data, "format", "$", str)
    if tag != format_tag(kind):
        doc.fail("$.format", f"expected {format_tag(kind)!r}, got {tag!r}")
    return data, doc


def _wrap_validation(doc: _Doc, build):
    try:
        return build()
    except ValidationError as exc:
        raise FormatError(str(exc), doc.source) from None


# ---------------------------------------------------------------------------
# Machines

_TRANSITION_FIELDS = ("from", "read", "to", "write", "move", "output", "input", "input_move")


def machine_from_data(data: dict, doc: _Doc) -> Machine:
    states_raw = doc.get(data, "states", "$", dict)
    states = {}
    for q, k in states_raw.items():
        try:
            states[q] = StateKind(k)
        except ValueError:
            doc.fail(f"$.states.{q}", f"unknown state kind {k!r}")
    transitions = []
    for i, t in enumerate(doc.get(data, "transitions", "$", list)):
        path = f"$.transitions[{i}]"
        if isinstance(t, list):
            if not 4 <= len(t) <= 8:
                doc.fail(path, "array transitions need 4 to 8 entries")
            t = dict(zip(_TRANSITION_FIELDS, t))
        if not isinstance(t, dict):
            doc.fail(path, "transition must be an object or an array")
        transitions.append(Transition(
            doc.get(t, "from", path, str), doc.get(t, "read", path, str),
            doc.get(t, "to", path, str), doc.get(t, "write", path, str),
            doc.get(t, "move", path, str, "S"), doc.get(t, "output", path, (str, type(None)), None),
            doc.get(t, "input", path, (str, type(None)), None),
            doc.get(t, "input_move", path, str, "S")))
    return _wrap_validation(doc, lambda: Machine.build(
        states, transitions, doc.get(data, "initial", "$", str),
        input_alphabet=doc.get(data, "input_alphabet", "$", list, []),
        blank=doc.get(data, "blank", "$", str, "_"),
        auxiliary=doc.get(data, "auxiliary", "$", list, []),
        work_alphabet=doc.get(data, "work_alphabet", "$", list, []),
        output_alphabet=doc.get(data, "output_alphabet", "$", list, [])))


def machine_to_data(m: Machine) -> dict:
    def transition(t: Transition) -> dict:
        d = {"from": t.source, "read": t.read, "to": t.target, "write": t.write,
             "move": t.move, "output": t.output}
        if t.input is not None:
            d["input"] = t.input
        if t.input_move != "S":
            d["input_move"] = t.input_move
        return d

    return {
        "format": format_tag("machine"),
        "states": {q: k.value for q, k in m.states.items()},
        "initial": m.initial,
        "blank": m.blank,
        "input_alphabet": sorted(m.input_alphabet),
        "work_alphabet": sorted(m.work_alphabet),
        "output_alphabet": sorted(m.output_alphabet),
        "auxiliary": sorted(m.auxiliary),
        "transitions": [transition(t) for t in m.transitions],
    }


# ---------------------------------------------------------------------------
# Grammars

def grammar_from_data(data: dict, doc: _Doc) -> Grammar:
    rules = []
    for i, r in enumerate(doc.get(data, "rules", "$", list)):
        path = f"$.rules[{i}]"
        if isinstance(r, dict):
            head, body = doc.get(r, "head", path, str), doc.get(r, "body", path, list)
        elif isinstance(r, list) and len(r) == 2 and isinstance(r[0], str) and isinstance(r[1], list):
            head, body = r
        else:
            doc.fail(path, "rule must be [head, [body...]] or {head, body}")
        rules.append((head, tuple(body)))
    start = doc.get(data, "start", "$", str)
    terminals = doc.get(data, "terminals", "$", list, None)
    nonterminals = doc.get(data, "nonterminals", "$", list, [])
    return _wrap_validation(doc, lambda: Grammar.from_rules(rules, start, terminals, nonterminals))


def grammar_to_data(g: Grammar) -> dict:
    return {
        "format": format_tag("grammar"),
        "start": g.start,
        "nonterminals": sorted(g.nonterminals),
        "terminals": sorted(g.terminals),
        "rules": [[h, list(b)] for h, b in g.rules],
    }


# ---------------------------------------------------------------------------
# Graphs and oc relations

def graph_from_data(data: dict, doc: _Doc) -> LabeledGraph:
    vertices = doc.get(data, "vertices", "$", list)
    edges = []
    for i, e in enumerate(doc.get(data, "edges", "$", list)):
        if not isinstance(e, list) or len(e) not in (2, 3):
            doc.fail(f"$.edges[{i}]", "edge must be [from, to] or [from, to, label|null]")
        edges.append((e[0], e[1], e[2] if len(e) == 3 else None))
    return _wrap_validation(doc, lambda: LabeledGraph(tuple(vertices), tuple(edges)))


def graph_to_data(g: LabeledGraph) -> dict:
    return {"format": format_tag("graph"), "vertices": list(g.vertices),
            "edges": [list(e) for e in g.edges]}


def oc_from_data(data: dict, doc: _Doc) -> OCRelation:
    pairs = []
    for i, p in enumerate(doc.get(data, "pairs", "$", list)):
        if not isinstance(p, list) or len(p) != 2:
            doc.fail(f"$.pairs[{i}]", "pair must be [opening, closing]")
        pairs.append(tuple(p))
    return OCRelation(frozenset(pairs))


def oc_to_data(oc: OCRelation) -> dict:
    return {"format": format_tag("oc"), "pairs": [list(p) for p in sorted(oc.pairs)]}


# ---------------------------------------------------------------------------
# Databases, queries, join trees

def database_from_data(data: dict, doc: _Doc) -> Database:
    relations = {}
    for name, tuples in doc.get(data, "relations", "$", dict).items():
        if not isinstance(tuples, list) or not all(isinstance(t, list) for t in tuples):
            doc.fail(f"$.relations.{name}", "relation must be an array of tuples")
        relations[name] = {tuple(t) for t in tuples}
    return _wrap_validation(doc, lambda: Database(relations))


def database_to_data(d: Database) -> dict:
    return {"format": format_tag("database"),
            "relations": {k: [list(t) for t in sorted(v)] for k, v in d.relations.items()}}


def query_from_data(data: dict, doc: _Doc) -> ConjunctiveQuery:
    free = doc.get(data, "free", "$", list)
    atoms = []
    for i, a in enumerate(doc.get(data, "atoms", "$", list)):
        if not (isinstance(a, list) and len(a) == 2 and isinstance(a[1], list)):
            doc.fail(f"$.atoms[{i}]", "atom must be [relation, [variables...]]")
        atoms.append((a[0], tuple(a[1])))
    return _wrap_validation(doc, lambda: ConjunctiveQuery(tuple(free), tuple(atoms)))


def query_to_data(q: ConjunctiveQuery) -> dict:
    return {"format": format_tag("query"), "free": list(q.free),
            "atoms": [[n, list(vs)] for n, vs in q.atoms]}


def jointree_from_data(data: dict, doc: _Doc) -> JoinTree:
    root = doc.get(data, "root", "$", int)
    parent = {}
    for i, e in enumerate(doc.get(data, "edges", "$", list)):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            doc.fail(f"$.edges[{i}]", "edge must be [parent, child] atom indices")
        if e[1] in parent:
            doc.fail(f"$.edges[{i}]", f"atom {e[1]} has two parents")
        parent[e[1]] = e[0]
    return JoinTree(root, parent)


def jointree_to_data(t: JoinTree) -> dict:
    return {"format": format_tag("jointree"), "root": t.root,
            "edges": [[p, c] for c, p in sorted(t.parent.items())]}


_READERS = {
    "machine": machine_from_data, "grammar": grammar_from_data, "graph": graph_from_data,
    "oc": oc_from_data, "database": database_from_data, "query": query_from_data,
    "jointree": jointree_from_data,
}
_WRITERS = {
    Machine: machine_to_data, Grammar: grammar_to_data, LabeledGraph: graph_to_data,
    OCRelation: oc_to_data, Database: database_to_data, ConjunctiveQuery: query_to_data,
    JoinTree: jointree_to_data,
}


def loads(text: str, kind: str, source: str = "<string>"):
    data, doc = _parse_text(text, source, kind)
    return _READERS[kind](data, doc)


def load(path, kind: str):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read file: {exc.strerror}", str(path)) from None
    return loads(text, kind, str(path))


def dumps(obj) -> str:
    return json.dumps(_WRITERS[type(obj)](obj), ensure_ascii=False, indent=2) + "\n"


def dump(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
