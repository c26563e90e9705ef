import random

import pytest

from conftest import A, E, R, T, U, accept_machine, sampled_machines
from spanalt.errors import ValidationError
from spanalt.generators import random_machine
from spanalt.machine import (Machine, RunBounds, count_trees, enumerate_accepting_trees, forest,
                             output_set, span, tree_measure)
from spanalt.normalize import binarize, enforce_budget, is_binarized, safe_tree_cap


def fan(k, kind=U):
    letters = "abcdefgh"[:k]
    return Machine.build({"q0": kind, "qa": A}, [T("q0", "qa", x) for x in letters], "q0")


class TestBinarize:
    def test_four_way_fan_keeps_output(self):
        m = binarize(fan(4))
        assert is_binarized(m)
        assert output_set(m, "", RunBounds(1, 20)) == {forest("a", "b", "c", "d")}

    def test_cascade_links_emit_nothing(self):
        m = fan(5)
        b = binarize(m)
        new = [t for t in b.transitions if t.source in b.auxiliary or t.target in b.auxiliary]
        links = [t for t in new if t.target in b.auxiliary]
        assert links and all(t.output is None for t in links)
        assert all(b.kind(q) is U for q in b.auxiliary)

    def test_no_universal_unchanged(self):
        m = Machine.build({"q0": E, "qa": A}, [T("q0", "qa", "a"), T("q0", "qa", "b")], "q0")
        assert binarize(m) == m

    def test_binary_unchanged(self):
        assert binarize(fan(2)) == fan(2)

    def test_unary_becomes_existential(self):
        b = binarize(fan(1))
        assert b.kind("q0") is E
        assert span(b, "", RunBounds(1, 3)) == 1

    def test_nullary_universal(self):
        m = Machine.build({"q0": E, "q1": U, "qa": A}, [T("q0", "q1", "x"), T("q0", "qa", "y")], "q0")
        b = binarize(m)
        assert b.kind("q1") is R
        assert output_set(b, "", RunBounds(1, 5)) == output_set(m, "", RunBounds(1, 5))

    def test_mixed_arities_get_dispatcher(self):
        m = Machine.build({"q0": U, "qa": A},
                          [T("q0", "qa", "x", read="_", write="1"),
                           T("q0", "qa", "a", read="1"), T("q0", "qa", "b", read="1"),
                           T("q0", "qa", "c", read="1")], "q0")
        b = binarize(m)
        assert is_binarized(b) and b.kind("q0") is E
        bounds = RunBounds(1, 5)
        assert output_set(b, "", RunBounds(1, 5, principal_only=True)) == output_set(m, "", bounds)

    def test_principal_budget_preserved_on_random_machines(self):
        for m, space, budget in sampled_machines(21, 60):
            b = binarize(m)
            assert is_binarized(b)
            bounds = RunBounds(space, budget)
            pb = RunBounds(space, budget, principal_only=True)
            assert output_set(b, "", pb) == output_set(m, "", bounds)
            assert count_trees(b, "", pb) == count_trees(m, "", bounds)

    def test_doubled_budget_is_enough_for_three_way_fans(self):
        # a k-ary fan of n nodes becomes at most 2n - 1 nodes, so 2Z never loses trees
        rng = random.Random(5)
        for _ in range(40):
            m = random_machine(rng, 4, max_fanout=3, universal_share=0.6)
            z = rng.randint(1, 5)
            assert span(binarize(m), "", RunBounds(2, 2 * z)) >= span(m, "", RunBounds(2, z))


class TestEnforceBudget:
    def test_requires_binarized(self):
        with pytest.raises(ValidationError):
            enforce_budget(fan(3), 4)

    def test_rejects_zero_budget(self):
        with pytest.raises(ValidationError):
            enforce_budget(accept_machine(), 0)

    def test_immediate_accept(self):
        m = enforce_budget(accept_machine(), 1)
        assert span(m, "", RunBounds(1, None)) == 1

    def test_sizes_three_and_seven_budget_five(self):
        # two existential routes: a 3-node chain emitting "s" and a 7-node chain emitting "l"
        states = {"q0": E, "qa": A}
        ts = []
        prev = "q0"
        for i in range(1, 2):
            states[f"s{i}"] = E
            ts.append(T(prev, f"s{i}"))
            prev = f"s{i}"
        ts.append(T(prev, "qa", "s"))
        prev = "q0"
        for i in range(1, 6):
            states[f"l{i}"] = E
            ts.append(T(prev, f"l{i}"))
            prev = f"l{i}"
        ts.append(T(prev, "qa", "l"))
        m = Machine.build(states, ts, "q0")
        sizes = sorted(t.size() for t in enumerate_accepting_trees(m, "", RunBounds(1, 10)))
        assert sizes == [3, 7]
        n = enforce_budget(m, 5)
        assert output_set(n, "", RunBounds(1, None)) == {forest("s")}

    def test_never_accepts_beyond_budget(self):
        for m, space, budget in sampled_machines(33, 25):
            n = enforce_budget(binarize(m), budget)
            for tree in enumerate_accepting_trees(n, "", RunBounds(space, safe_tree_cap(budget))):
                assert tree_measure(n, tree, principal_only=True) <= budget

    def test_span_identity_on_random_machines(self):
        for m, space, budget in sampled_machines(44, 40):
            n = enforce_budget(binarize(m), budget)
            expected = span(m, "", RunBounds(space, budget))
            assert span(n, "", RunBounds(space, safe_tree_cap(budget))) == expected
            assert span(n, "", RunBounds(space, None)) == expected
