import random

from spanalt.generators import random_machine
from spanalt.machine import NO_OUTPUT, Machine, RunBounds, StateKind, Transition, span

E, A, U, R = StateKind.EXISTS, StateKind.ACCEPT, StateKind.FORALL, StateKind.REJECT


def T(src, dst, out=NO_OUTPUT, read="_", write="_", move="S", **kw):
    return Transition(src, read, dst, write, move, out, **kw)


def accept_machine():
    return Machine.build({"q0": A}, (), "q0")


def two_branch(a="a", b="a"):
    return Machine.build({"q0": E, "qa": A},
                         [T("q0", "qa", a, move="R"), T("q0", "qa", b)], "q0")


def sampled_machines(seed, count, min_nonzero=0.6, max_states=5):
    """``count`` random (machine, space, tree budget) triples, mostly with nonzero span."""
    rng = random.Random(seed)
    zeros_allowed = int(count * (1 - min_nonzero))
    out = []
    while len(out) < count:
        m = random_machine(rng, rng.randint(2, max_states), "_1")
        space, budget = rng.randint(1, 3), rng.randint(1, 8)
        if span(m, "", RunBounds(space, budget)) == 0:
            if zeros_allowed == 0:
                continue
            zeros_allowed -= 1
        out.append((m, space, budget))
    return out


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for number in sorted(verdicts):
            terminalreporter.write_line(verdicts[number])
