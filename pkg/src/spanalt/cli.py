"""Command-line front end.

Exit codes: 0 success (all requested cross-checks agree), 1 a cross-check
disagreed, 2 bad input or usage, 3 an enumeration cap was hit.

Environment: ``SPANALT_SEED`` sets the default seed; ``SPANALT_CAP_WORDS``,
``SPANALT_CAP_WALKS`` and ``SPANALT_CAP_TREES`` set the default caps.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from . import acq, compile as compile_mod, estimator, grammar, io, machine, normalize, wfwalks
from .errors import ResourceError, SpanaltError

ENV_PREFIX = "SPANALT_"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SpanaltError(f"environment variable {ENV_PREFIX + name} must be an integer") from None


@dataclass
class CrossCheck:
    method: str
    value: Any
    agree: bool


@dataclass
class RunReport:
    command: str
    inputs: dict
    result: Any
    cross_checks: list = field(default_factory=list)
    wall_time: float = 0.0
    seed: Optional[int] = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.agree for c in self.cross_checks)

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, indent=2, default=str)

    def to_text(self) -> str:
        lines = [f"{self.command}: {self._fmt(self.result)}"]
        for key, value in self.details.items():
            lines.append(f"  {key}: {self._fmt(value)}")
        for c in self.cross_checks:
            lines.append(f"  check {c.method}: {self._fmt(c.value)} [{'agree' if c.agree else 'DISAGREE'}]")
        if self.seed is not None:
            lines.append(f"  seed: {self.seed}")
        lines.append(f"  time: {self.wall_time:.3f}s")
        return "\n".join(lines)

    @staticmethod
    def _fmt(value) -> str:
        if isinstance(value, dict) and "std_error" in value:
            return f"{value['value']} ± {value['std_error']} ({value['samples']} samples)"
        return str(value)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _natural(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return value


def _digests(*paths) -> dict:
    return {str(p): io.file_digest(p) for p in paths if p is not None}


# ---------------------------------------------------------------------------
# machine

def _span_with_cap(m, word, bounds, cap: int) -> int:
    seen = set()
    for i, tree in enumerate(machine.enumerate_accepting_trees(m, word, bounds)):
        if i >= cap:
            raise ResourceError("tree enumeration", cap)
        seen.add(machine.canonical_encoding(machine.out(tree)))
    return len(seen)


def cmd_machine_span(args) -> RunReport:
    m = io.load(args.machine, "machine")
    bounds = machine.RunBounds(args.space, args.tree_size)
    result = machine.span(m, args.input, bounds)
    report = RunReport("machine span", _digests(args.machine), result)
    if args.count_trees:
        report.details["count_trees"] = machine.count_trees(m, args.input, bounds)
    if args.check:
        value = _span_with_cap(m, args.input, bounds, args.cap_trees)
        report.cross_checks.append(CrossCheck("tree-enumeration", value, value == result))
    return report


def cmd_machine_normalize(args) -> RunReport:
    m = io.load(args.machine, "machine")
    result = normalize.binarize(m)
    if args.budget is not None:
        result = normalize.enforce_budget(result, args.budget)
    io.dump(result, args.output)
    report = RunReport("machine normalize", _digests(args.machine), str(args.output))
    report.details.update(states=len(result.states), transitions=len(result.transitions))
    if args.budget is not None:
        report.details["safe_tree_cap"] = normalize.safe_tree_cap(args.budget)
    return report


def cmd_machine_compile(args) -> RunReport:
    m = io.load(args.machine, "machine")
    bounds = machine.RunBounds(args.space, args.tree_size)
    g = compile_mod.compile_to_cfg(m, args.input, bounds)
    if args.output:
        io.dump(g, args.output)
    report = RunReport("machine compile", _digests(args.machine), str(args.output or "-"))
    report.details.update(nonterminals=len(g.nonterminals), rules=len(g.rules))
    if not args.output:
        report.details["grammar"] = str(g)
    if args.count or args.check:
        words = grammar.count_words_upto(g, 3 * args.tree_size, args.cap_words)
        report.details["words_upto_3Z"] = words
        if args.check:
            value = machine.span(m, args.input, bounds)
            report.cross_checks.append(CrossCheck("machine-span", value, value == words))
    return report


# ---------------------------------------------------------------------------
# cfg

def cmd_cfg(args) -> RunReport:
    g = io.load(args.grammar, "grammar")
    inputs = _digests(args.grammar)
    action = args.action
    n = args.length
    if action == "count":
        result = grammar.count_words(g, n, args.cap_words)
        report = RunReport("cfg count", inputs, result)
        if args.check:
            value = grammar.count_words(grammar.to_cnf(g), n, args.cap_words)
            report.cross_checks.append(CrossCheck("cnf-enumeration", value, value == result))
            m, word, bounds = compile_mod.cnfg_to_atrm(grammar.to_cnf(g), n)
            value = machine.span(m, word, bounds)
            report.cross_checks.append(CrossCheck("machine-span", value, value == result))
    elif action == "upto":
        result = grammar.count_words_upto(g, n, args.cap_words)
        report = RunReport("cfg upto", inputs, result)
        if args.check:
            value = sum(grammar.count_words(g, i, args.cap_words) for i in range(n + 1))
            report.cross_checks.append(CrossCheck("per-length-sum", value, value == result))
    elif action == "estimate":
        fn = estimator.estimate_count_upto if args.upto else estimator.estimate_count_words
        est = fn(g, n, args.samples, args.seed)
        report = RunReport("cfg estimate", inputs, est.as_dict(), seed=args.seed)
        if args.check:
            exact = (grammar.count_words_upto if args.upto else grammar.count_words)(g, n, args.cap_words)
            close = abs(est.value - exact) <= max(4 * est.std_error, 1e-9 * max(1, exact))
            report.cross_checks.append(CrossCheck("exact-count(4se)", exact, close))
    elif action == "cnf":
        cnf = grammar.to_cnf(g)
        if args.output:
            io.dump(cnf, args.output)
        report = RunReport("cfg cnf", inputs, str(args.output) if args.output else str(cnf))
        report.details.update(nonterminals=len(cnf.nonterminals), rules=len(cnf.rules))
        if args.check:
            same = all(grammar.enumerate_words(g, i, args.cap_words)
                       == grammar.enumerate_words(cnf, i, args.cap_words) for i in range(n + 1))
            report.cross_checks.append(CrossCheck(f"same-words-upto-{n}", same, same))
    else:  # ambig
        result = grammar.is_unambiguous_upto(g, n, args.cap_words)
        report = RunReport("cfg ambig", inputs, "unambiguous" if result else "ambiguous")
        report.details["bounded_check_upto"] = n
    return report


# ---------------------------------------------------------------------------
# applications

def cmd_wfwalks(args) -> RunReport:
    g = io.load(args.graph, "graph")
    oc = io.load(args.oc, "oc")
    inputs = _digests(args.graph, args.oc)
    strict = args.strict
    lengths = range(args.length + 1) if args.upto else [args.length]
    if args.upto:
        result = wfwalks.wf_walk_span_upto(g, oc, args.source, args.target, args.length, strict)
    else:
        result = wfwalks.wf_walk_span(g, oc, wfwalks.WalkQuery(args.source, args.target, args.length), strict)
    report = RunReport("wfwalks", inputs, result)
    report.details["semantics"] = "strict" if strict else "amended"
    if args.oracle:
        value = sum(wfwalks.oracle_wf_walks(g, oc, wfwalks.WalkQuery(args.source, args.target, i),
                                            args.cap_walks, strict) for i in lengths)
        report.cross_checks.append(CrossCheck("oracle", value, value == result))
    if args.machine_check:
        value = 0
        for i in lengths:
            m, word, _ = wfwalks.build_wfwalks_machine(
                g, oc, wfwalks.WalkQuery(args.source, args.target, i), strict)
            value += machine.span(m, word, machine.RunBounds(1, None))
        report.cross_checks.append(CrossCheck("machine-span", value, value == result))
    return report


def cmd_acq(args) -> RunReport:
    d = io.load(args.database, "database")
    q = io.load(args.query, "query")
    if args.jointree:
        t = io.load(args.jointree, "jointree")
    else:
        t = acq.gyo_join_tree(q)
    report = RunReport("acq", _digests(args.database, args.query, args.jointree), None)
    problem = acq.join_tree_problem(q, t)
    if problem:
        raise SpanaltError(f"invalid join tree: {problem}")
    report.result = acq.acq_span(q, d, t)
    if not args.jointree:
        report.details["join_tree"] = io.jointree_to_data(t)
    if args.oracle:
        value = acq.oracle_count_answers(q, d)
        report.cross_checks.append(CrossCheck("oracle-join", value, value == report.result))
    return report


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the run report as JSON")
    common.add_argument("--check", action="store_true", help="run independent cross-checks")
    common.add_argument("--seed", type=int, default=None, help="seed (default: $SPANALT_SEED or 0)")
    common.add_argument("--cap-words", type=_positive, default=None)
    common.add_argument("--cap-walks", type=_positive, default=None)
    common.add_argument("--cap-trees", type=_positive, default=None)

    parser = argparse.ArgumentParser(prog="spanalt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True)

    mach = sub.add_parser("machine", help="alternating transducer machines")
    msub = mach.add_subparsers(dest="action", required=True)
    for name, fn in (("span", cmd_machine_span), ("compile", cmd_machine_compile)):
        p = msub.add_parser(name, parents=[common])
        p.add_argument("machine")
        p.add_argument("--input", default="")
        p.add_argument("--space", type=_positive, required=True)
        p.add_argument("--tree-size", type=_positive, required=True)
        p.set_defaults(func=fn)
        if name == "span":
            p.add_argument("--count-trees", action="store_true")
        else:
            p.add_argument("-o", "--output")
            p.add_argument("--count", action="store_true", help="print |L<=3Z| of the grammar")
    p = msub.add_parser("normalize", parents=[common], help="binarize (and optionally add a budget counter)")
    p.add_argument("machine")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--budget", type=_positive)
    p.set_defaults(func=cmd_machine_normalize)

    cfg = sub.add_parser("cfg", parents=[common], help="context-free grammars")
    cfg.add_argument("action", choices=["count", "upto", "estimate", "cnf", "ambig"])
    cfg.add_argument("grammar")
    cfg.add_argument("--length", "-n", type=_natural, default=0)
    cfg.add_argument("--samples", type=_positive, default=1000)
    cfg.add_argument("--upto", action="store_true", help="estimate: sum lengths 0..n")
    cfg.add_argument("-o", "--output")
    cfg.set_defaults(func=cmd_cfg)

    wf = sub.add_parser("wfwalks", parents=[common], help="well-formed s-t walks")
    wf.add_argument("graph")
    wf.add_argument("oc")
    wf.add_argument("--from", dest="source", required=True)
    wf.add_argument("--to", dest="target", required=True)
    wf.add_argument("--length", "-n", type=_natural, required=True)
    wf.add_argument("--upto", action="store_true")
    wf.add_argument("--oracle", action="store_true")
    wf.add_argument("--machine-check", action="store_true")
    wf.add_argument("--strict", action="store_true",
                    help="use the grammar without concatenation after a closed pair")
    wf.set_defaults(func=cmd_wfwalks)

    q = sub.add_parser("acq", parents=[common], help="acyclic conjunctive query answers")
    q.add_argument("database")
    q.add_argument("query")
    q.add_argument("jointree", nargs="?")
    q.add_argument("--oracle", action="store_true")
    q.set_defaults(func=cmd_acq)
    return parser


def _resolve_defaults(args) -> None:
    if args.seed is None:
        args.seed = _env_int("SEED", 0)
    if args.cap_words is None:
        args.cap_words = _env_int("CAP_WORDS", 10**6)
    if args.cap_walks is None:
        args.cap_walks = _env_int("CAP_WALKS", 10**6)
    if args.cap_trees is None:
        args.cap_trees = _env_int("CAP_TREES", 10**6)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve_defaults(args)
        start = time.perf_counter()
        report = args.func(args)
        report.wall_time = time.perf_counter() - start
    except ResourceError as exc:
        print(f"spanalt: resource cap hit: {exc} (raise it with --cap-* or {ENV_PREFIX}CAP_*)",
              file=sys.stderr)
        return 3
    except SpanaltError as exc:
        print(f"spanalt: error: {exc}", file=sys.stderr)
        return 2
    print(report.to_json() if args.json else report.to_text())
    return 0 if report.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
