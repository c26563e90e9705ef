import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from spanalt.errors import ResourceError, ValidationError
from spanalt.generators import random_cnf_grammar
from spanalt.grammar import (Grammar, count_derivations, count_words, count_words_upto,
                             derivations_of_word, enumerate_words, is_cnf, is_unambiguous_upto,
                             membership, parse_grammar, remove_useless, to_cnf)

ANBN = "S -> a S b | ε"
CATALAN = "S -> S S | a"
WELL_FORMED = "S -> ε | a S | ( S ) S | [ S ] S"


def brute_words(g, n):
    """Words of length n found by exhaustive CYK over Σ^n (independent of the enumerator)."""
    c = to_cnf(g)
    return {w for w in itertools.product(sorted(g.terminals), repeat=n) if membership(c, w)}


def brute_derivations(g, symbol, word):
    """Derivation trees of ``word`` from ``symbol`` by direct recursion on a CNF grammar."""
    if len(word) == 0:
        return sum(1 for b in g.rules_for(symbol) if b == ())
    total = 0
    for body in g.rules_for(symbol):
        if len(body) == 1 and len(word) == 1 and body[0] == word[0]:
            total += 1
        elif len(body) == 2:
            for i in range(1, len(word)):
                total += brute_derivations(g, body[0], word[:i]) * brute_derivations(g, body[1], word[i:])
    return total


class TestModel:
    def test_parse_and_str(self):
        g = parse_grammar(ANBN)
        assert g.start == "S" and g.terminals == {"a", "b"}
        assert ("S", ()) in g.rules
        assert parse_grammar(str(g)) == g

    def test_invariants(self):
        with pytest.raises(ValidationError):
            Grammar(frozenset({"S"}), frozenset({"a"}), (("S", ("x",)),), "S")
        with pytest.raises(ValidationError):
            Grammar(frozenset({"S"}), frozenset({"a"}), (), "T")
        with pytest.raises(ValidationError):
            Grammar(frozenset({"S", "a"}), frozenset({"a"}), (), "S")

    def test_duplicate_rules_merged(self):
        g = Grammar.from_rules([("S", ("a",)), ("S", ("a",))], "S")
        assert len(g.rules) == 1

    def test_remove_useless(self):
        g = parse_grammar("S -> a | B\nB -> B b\nC -> c")
        r = remove_useless(g)
        assert r.nonterminals == {"S"} and r.rules == (("S", ("a",)),)


class TestCnf:
    def test_is_cnf(self):
        assert is_cnf(parse_grammar(CATALAN))
        assert not is_cnf(parse_grammar(ANBN))
        # epsilon is allowed only on a start symbol absent from right-hand sides
        assert not is_cnf(parse_grammar("S -> S S | a | ε"))

    def test_fixed_point(self):
        g = parse_grammar(CATALAN)
        assert to_cnf(g) is g

    def test_anbn_agrees_to_eight(self):
        g = parse_grammar(ANBN)
        c = to_cnf(g)
        assert is_cnf(c)
        for n in range(9):
            assert enumerate_words(c, n) == enumerate_words(g, n)

    def test_well_formed_grammar_to_six(self):
        g = parse_grammar(WELL_FORMED)
        c = to_cnf(g)
        for n in range(7):
            assert enumerate_words(c, n) == enumerate_words(g, n)

    def test_epsilon_convention(self):
        assert count_words(to_cnf(parse_grammar("S -> A A\nA -> a | ε")), 0) == 1
        assert count_words(to_cnf(parse_grammar("S -> A a\nA -> a | ε")), 0) == 0

    def test_unit_cycles(self):
        g = parse_grammar("S -> A | a\nA -> S | b A")
        c = to_cnf(g)
        for n in range(6):
            assert enumerate_words(c, n) == enumerate_words(g, n)

    @given(st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_random_general_grammars(self, seed):
        rng = random.Random(seed)
        nts = ["S", "A", "B"]
        rules = []
        for _ in range(rng.randint(2, 6)):
            body = tuple(rng.choice(nts + ["a", "b"]) for _ in range(rng.randint(0, 3)))
            rules.append((rng.choice(nts), body))
        g = Grammar.from_rules(rules, "S", terminals={"a", "b"})
        c = to_cnf(g)
        assert is_cnf(c)
        for n in range(6):
            assert enumerate_words(c, n) == enumerate_words(g, n)
            assert enumerate_words(g, n) == brute_words(g, n)
            assert count_derivations(c, n)[c.start, n] >= count_words(g, n)


class TestMembership:
    def test_simple(self):
        g = parse_grammar("S -> a")
        assert membership(g, "a") and not membership(g, "b")
        assert not membership(g, "")

    def test_well_formed(self):
        c = to_cnf(parse_grammar(WELL_FORMED))
        assert membership(c, "([a])")
        assert not membership(c, "(]")
        assert membership(c, "")

    def test_requires_cnf(self):
        with pytest.raises(ValidationError):
            membership(parse_grammar(ANBN), "ab")


class TestCounting:
    def test_single_rule_table(self):
        t = count_derivations(parse_grammar("S -> a"), 2)
        assert t["S", 1] == 1 and t["S", 2] == 0

    def test_catalan(self):
        c = to_cnf(parse_grammar(CATALAN))
        assert count_derivations(c, 3)[c.start, 3] == 2
        assert [count_derivations(c, 8)[c.start, n] for n in range(1, 9)] == [1, 1, 2, 5, 14, 42, 132, 429]

    def test_anbn_single_derivations(self):
        c = to_cnf(parse_grammar(ANBN))
        t = count_derivations(c, 10)
        assert [t[c.start, 2 * k] for k in range(6)] == [1] * 6

    def test_table_limit(self):
        with pytest.raises(KeyError):
            count_derivations(parse_grammar("S -> a"), 2)["S", 3]

    def test_derivations_of_word(self):
        c = to_cnf(parse_grammar(CATALAN))
        assert derivations_of_word(c, "aaa") == 2
        assert derivations_of_word(c, "ab") == 0
        a = to_cnf(parse_grammar(ANBN))
        assert derivations_of_word(a, "aabb") == 1

    def test_derivations_match_brute_force(self):
        rng = random.Random(4)
        for _ in range(40):
            g = random_cnf_grammar(rng, rng.randint(1, 4), "ab")
            for n in range(5):
                for w in itertools.product("ab", repeat=n):
                    assert derivations_of_word(g, w) == brute_derivations(g, g.start, w)
                total = sum(brute_derivations(g, g.start, w) for w in itertools.product("ab", repeat=n))
                assert count_derivations(g, n)[g.start, n] == total

    def test_enumerate_words_examples(self):
        assert enumerate_words(parse_grammar("S -> a"), 1) == {("a",)}
        assert enumerate_words(parse_grammar(ANBN), 4) == {tuple("aabb")}
        wf = parse_grammar("S -> ε | a S | ( S ) S | [ S ] S")
        assert enumerate_words(wf, 2) == {tuple("aa"), tuple("()"), tuple("[]")}

    def test_count_words_examples(self):
        g = parse_grammar(ANBN)
        assert count_words(g, 6) == 1 and count_words(g, 5) == 0
        assert count_words(to_cnf(parse_grammar(CATALAN)), 4) == 1
        assert count_words_upto(g, 6) == 4
        assert count_words_upto(parse_grammar(WELL_FORMED), 2) == 5
        empty = parse_grammar("S -> S a")
        assert all(count_words_upto(empty, n) == 0 for n in range(5))

    def test_cap(self):
        g = parse_grammar("S -> a S | b S | ε")
        with pytest.raises(ResourceError) as info:
            enumerate_words(g, 12, cap=100)
        assert info.value.cap == 100

    def test_unambiguity(self):
        assert is_unambiguous_upto(parse_grammar(ANBN), 8)
        assert not is_unambiguous_upto(parse_grammar(CATALAN), 3)
        assert is_unambiguous_upto(parse_grammar(CATALAN), 2)
        assert is_unambiguous_upto(parse_grammar("S -> S a"), 5)

    def test_words_equal_derivations_when_unambiguous(self):
        rng = random.Random(8)
        for _ in range(40):
            g = random_cnf_grammar(rng, rng.randint(1, 4), "ab")
            t = count_derivations(g, 6)
            for n in range(7):
                assert count_words(g, n) <= t[g.start, n]
            if is_unambiguous_upto(g, 6):
                assert all(count_words(g, n) == t[g.start, n] for n in range(7))
