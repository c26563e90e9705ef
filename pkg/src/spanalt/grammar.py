"""Context-free grammars: CNF conversion, CYK, derivation counting and exact word counts.

Words are tuples of terminal symbols.  Any sequence is accepted as input, so
a plain ``str`` works whenever every terminal is a single character.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import _kernels
from .errors import ResourceError, ValidationError

EPSILON_TOKENS = ("ε", "eps", "''")


def default_word_cap() -> int:
    return int(os.environ.get("SPANALT_CAP_WORDS", 10**6))


@dataclass(frozen=True)
class Grammar:
    nonterminals: frozenset
    terminals: frozenset
    rules: tuple
    start: str
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        rules = tuple(dict.fromkeys((h, tuple(b)) for h, b in self.rules))
        object.__setattr__(self, "rules", rules)
        if self.nonterminals & self.terminals:
            raise ValidationError(
                f"symbols both terminal and nonterminal: {sorted(self.nonterminals & self.terminals)}")
        if self.start not in self.nonterminals:
            raise ValidationError(f"start symbol {self.start!r} is not a nonterminal")
        symbols = self.nonterminals | self.terminals
        for head, body in rules:
            if head not in self.nonterminals:
                raise ValidationError(f"rule head {head!r} is not a nonterminal")
            for x in body:
                if x not in symbols:
                    raise ValidationError(f"rule {head} -> {' '.join(body)}: unknown symbol {x!r}")

    @classmethod
    def from_rules(cls, rules: Iterable, start: str, terminals: Optional[Iterable] = None,
                   nonterminals: Iterable = ()) -> "Grammar":
        """Infer nonterminals from rule heads; every other body symbol is a terminal."""
        rules = [(h, tuple(b)) for h, b in rules]
        nts = {h for h, _ in rules} | {start} | set(nonterminals)
        if terminals is None:
            terms = {x for _, b in rules for x in b if x not in nts}
        else:
            terms = set(terminals)
            nts |= {x for _, b in rules for x in b if x not in terms}
        return cls(frozenset(nts), frozenset(terms), tuple(rules), start)

    def rules_for(self, head: str) -> list:
        by_head = self._cache.get("by_head")
        if by_head is None:
            by_head = {}
            for h, b in self.rules:
                by_head.setdefault(h, []).append(b)
            self._cache["by_head"] = by_head
        return by_head.get(head, [])

    def __str__(self) -> str:
        lines = []
        for head in sorted(self.nonterminals, key=lambda x: (x != self.start, x)):
            bodies = [" ".join(b) if b else "ε" for b in self.rules_for(head)]
            if bodies:
                lines.append(f"{head} -> {' | '.join(bodies)}")
        return "\n".join(lines)


def parse_grammar(text: str, start: Optional[str] = None) -> Grammar:
    """Parse ``A -> x y | z`` lines; symbols are whitespace separated, ``ε`` or an empty alternative is epsilon.

    Left-hand sides are the nonterminals; the first one is the start symbol
    unless ``start`` is given.
    """
    rules = []
    heads: list = []
    for raw in text.strip().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" not in line:
            raise ValidationError(f"expected 'A -> ...' in line {raw!r}")
        head, rhs = (part.strip() for part in line.split("->", 1))
        heads.append(head)
        for alt in rhs.split("|"):
            body = tuple(x for x in alt.split() if x not in EPSILON_TOKENS)
            rules.append((head, body))
    if not heads:
        raise ValidationError("empty grammar text")
    nts = set(heads)
    terms = {x for _, b in rules for x in b if x not in nts}
    return Grammar(frozenset(nts), frozenset(terms), tuple(rules), start or heads[0])


# ---------------------------------------------------------------------------
# Normal forms

def is_cnf(g: Grammar) -> bool:
    """Rules are ``A -> B C``, ``A -> a`` or ``S -> ε`` (the last only if S is on no right-hand side)."""
    has_eps = False
    start_on_rhs = False
    for head, body in g.rules:
        if len(body) == 0:
            if head != g.start:
                return False
            has_eps = True
        elif len(body) == 1:
            if body[0] not in g.terminals:
                return False
        elif len(body) == 2:
            if body[0] not in g.nonterminals or body[1] not in g.nonterminals:
                return False
            start_on_rhs |= g.start in body
        else:
            return False
    return not (has_eps and start_on_rhs)


def _generating(nts, rules, terminals) -> set:
    gen: set = set()
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if head not in gen and all(x in terminals or x in gen for x in body):
                gen.add(head)
                changed = True
    return gen


def remove_useless(g: Grammar) -> Grammar:
    """Drop nonterminals that derive no terminal word or are unreachable from the start."""
    gen = _generating(g.nonterminals, g.rules, g.terminals)
    rules = [(h, b) for h, b in g.rules
             if h in gen and all(x in g.terminals or x in gen for x in b)]
    reach = {g.start}
    stack = [g.start]
    by_head: dict = {}
    for h, b in rules:
        by_head.setdefault(h, []).append(b)
    while stack:
        for b in by_head.get(stack.pop(), []):
            for x in b:
                if x in g.nonterminals and x not in reach:
                    reach.add(x)
                    stack.append(x)
    rules = [(h, b) for h, b in rules if h in reach]
    return Grammar(frozenset(reach), g.terminals, tuple(rules), g.start)


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)

    def __call__(self, base: str) -> str:
        name, i = base, 0
        while name in self.taken:
            i += 1
            name = f"{base}{i}"
        self.taken.add(name)
        return name


def to_cnf(g: Grammar) -> Grammar:
    """Equivalent grammar in Chomsky normal form (useless symbols removed first).

    The empty word stays in the language exactly when it was there, via a
    rule ``S0 -> ε`` on a start symbol that occurs on no right-hand side.
    Duplicate rules are merged, so derivation counts never increase.
    """
    if is_cnf(g):
        return g
    g = remove_useless(g)
    fresh = _Fresh(g.nonterminals | g.terminals)
    nts = set(g.nonterminals)
    rules = list(g.rules)
    start = g.start

    if any(start in b for _, b in rules):
        new_start = fresh(start + "0")
        nts.add(new_start)
        rules.append((new_start, (start,)))
        start = new_start

    # terminals inside long bodies get their own nonterminal
    term_nt: dict = {}
    step = []
    for head, body in rules:
        if len(body) >= 2:
            new_body = []
            for x in body:
                if x in g.terminals:
                    if x not in term_nt:
                        term_nt[x] = fresh(f"T[{x}]")
                        nts.add(term_nt[x])
                        step.append((term_nt[x], (x,)))
                    new_body.append(term_nt[x])
                else:
                    new_body.append(x)
            body = tuple(new_body)
        step.append((head, body))
    rules = step

    # split long bodies
    step = []
    for head, body in rules:
        prev = head
        while len(body) > 2:
            nxt = fresh(f"{head}_")
            nts.add(nxt)
            step.append((prev, (body[0], nxt)))
            prev, body = nxt, body[1:]
        step.append((prev, body))
    rules = step

    # eliminate epsilon rules
    nullable: set = set()
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if head not in nullable and all(x in nullable for x in body):
                nullable.add(head)
                changed = True
    step = []
    for head, body in rules:
        if len(body) == 2:
            a, b = body
            step.append((head, body))
            if a in nullable:
                step.append((head, (b,)))
            if b in nullable:
                step.append((head, (a,)))
        elif len(body) == 1:
            step.append((head, body))
    if start in nullable:
        step.append((start, ()))
    rules = list(dict.fromkeys(step))

    # eliminate unit rules
    unit: dict = {A: {A} for A in nts}
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if len(body) == 1 and body[0] in nts:
                for A in nts:
                    if head in unit[A] and body[0] not in unit[A]:
                        unit[A].add(body[0])
                        changed = True
    proper: dict = {}
    for head, body in rules:
        if not (len(body) == 1 and body[0] in nts):
            proper.setdefault(head, []).append(body)
    step = []
    for A in sorted(nts):
        for B in sorted(unit[A]):
            for body in proper.get(B, []):
                if body == () and A != start:
                    continue
                step.append((A, body))
    result = remove_useless(Grammar(frozenset(nts), g.terminals, tuple(step), start))
    if not is_cnf(result):  # pragma: no cover - guards the construction itself
        raise AssertionError("CNF conversion produced a non-CNF grammar")
    return result


# ---------------------------------------------------------------------------
# CYK and derivation counts

def _index(g: Grammar):
    idx = g._cache.get("cnf_index")
    if idx is None:
        if not is_cnf(g):
            raise ValidationError("grammar is not in Chomsky normal form; run to_cnf first")
        nts = sorted(g.nonterminals)
        nid = {A: i for i, A in enumerate(nts)}
        terms = sorted(g.terminals)
        tid = {a: i for i, a in enumerate(terms)}
        binary = []
        unary = [[] for _ in terms]
        unary_count = [0] * len(nts)
        for head, body in g.rules:
            if len(body) == 2:
                binary.append((nid[head], nid[body[0]], nid[body[1]]))
            elif len(body) == 1:
                unary[tid[body[0]]].append(nid[head])
                unary_count[nid[head]] += 1
        has_eps = (g.start, ()) in g.rules
        idx = (nts, nid, tid, binary, unary, unary_count, has_eps)
        g._cache["cnf_index"] = idx
    return idx


def _encode(tid: dict, w: Sequence) -> Optional[list]:
    try:
        return [tid[a] for a in w]
    except KeyError:
        return None


def membership(g_cnf: Grammar, w: Sequence) -> bool:
    """CYK recognition of ``w`` on a CNF grammar."""
    nts, nid, tid, binary, unary, _, has_eps = _index(g_cnf)
    if len(w) == 0:
        return has_eps
    word = _encode(tid, w)
    if word is None:
        return False
    return _kernels.cyk_recognize(len(nts), binary, unary, word, nid[g_cnf.start])


def derivations_of_word(g_cnf: Grammar, w: Sequence) -> int:
    """Number of distinct derivation trees of ``w``."""
    nts, nid, tid, binary, unary, _, has_eps = _index(g_cnf)
    if len(w) == 0:
        return 1 if has_eps else 0
    word = _encode(tid, w)
    if word is None:
        return 0
    return _kernels.cyk_count(len(nts), binary, unary, word, nid[g_cnf.start])


@dataclass(frozen=True)
class DerivationTable:
    """Derivation-tree counts per ``(nonterminal, yield length)`` up to ``max_length``."""

    entries: dict
    max_length: int

    def __getitem__(self, key) -> int:
        A, length = key
        if length > self.max_length:
            raise KeyError(f"length {length} beyond table limit {self.max_length}")
        return self.entries.get((A, length), 0)

    def total(self, A: str, length: int) -> int:
        return self[A, length]


def count_derivations(g_cnf: Grammar, n: int) -> DerivationTable:
    nts, nid, tid, binary, unary, unary_count, has_eps = _index(g_cnf)
    table = _kernels.length_counts(len(nts), binary, unary_count, n)
    entries = {}
    for A, row in zip(nts, table):
        for length in range(1, n + 1):
            if row[length]:
                entries[(A, length)] = row[length]
    if has_eps:
        entries[(g_cnf.start, 0)] = 1
    return DerivationTable(entries, n)


# ---------------------------------------------------------------------------
# Exact word enumeration (works on arbitrary grammars, no CNF needed)

def _word_table(g: Grammar, n: int, cap: int) -> dict:
    """Least fixed point of ``W[A][l]`` = words of length ``l`` derivable from ``A``.

    A worklist re-evaluates a rule whenever a nonterminal in its body gains
    words, which handles epsilon and unit cycles without CNF conversion.
    """
    table: dict = {A: {} for A in g.nonterminals}
    users: dict = {}
    for i, (_, body) in enumerate(g.rules):
        for x in set(body):
            if x in g.nonterminals:
                users.setdefault(x, []).append(i)
    queue = list(range(len(g.rules)))
    queued = set(queue)
    stored = 0
    while queue:
        i = queue.pop()
        queued.discard(i)
        head, body = g.rules[i]
        partial = {0: {()}}
        for x in body:
            nxt: dict = {}
            if x in g.terminals:
                for length, ws in partial.items():
                    if length < n:
                        nxt[length + 1] = {w + (x,) for w in ws}
            else:
                for length, ws in partial.items():
                    for l2, ws2 in table[x].items():
                        if length + l2 <= n:
                            bucket = nxt.setdefault(length + l2, set())
                            bucket.update(w + v for w in ws for v in ws2)
            partial = nxt
            if not partial:
                break
        grew = False
        target = table[head]
        for length, ws in partial.items():
            bucket = target.setdefault(length, set())
            before = len(bucket)
            bucket |= ws
            if len(bucket) != before:
                grew = True
                stored += len(bucket) - before
                if stored > cap:
                    raise ResourceError("word enumeration", cap)
        if grew:
            for j in users.get(head, ()):
                if j not in queued:
                    queued.add(j)
                    queue.append(j)
    return table


def enumerate_words(g: Grammar, n: int, cap: Optional[int] = None) -> frozenset:
    """The set ``L_n(g)`` of words of length exactly ``n``."""
    cap = default_word_cap() if cap is None else cap
    table = _word_table(g, n, cap)
    return frozenset(table[g.start].get(n, ()))


def enumerate_words_upto(g: Grammar, n: int, cap: Optional[int] = None) -> dict:
    """``{l: L_l(g)}`` for every ``l <= n`` from a single fixed-point computation."""
    cap = default_word_cap() if cap is None else cap
    table = _word_table(g, n, cap)
    return {length: frozenset(table[g.start].get(length, ())) for length in range(n + 1)}


def count_words(g: Grammar, n: int, cap: Optional[int] = None) -> int:
    return len(enumerate_words(g, n, cap))


def count_words_upto(g: Grammar, n: int, cap: Optional[int] = None) -> int:
    return sum(len(ws) for ws in enumerate_words_upto(g, n, cap).values())


def is_unambiguous_upto(g: Grammar, n: int, cap: Optional[int] = None) -> bool:
    """Bounded check: no word of length ``<= n`` has two derivation trees in the CNF form of ``g``.

    Ambiguity is undecidable in general; this only inspects short words.
    """
    g_cnf = to_cnf(g)
    table = count_derivations(g_cnf, n)
    words = enumerate_words_upto(g_cnf, n, cap)
    for length in range(n + 1):
        # every word has >= 1 derivation, so equal totals rule out ambiguity at this length
        if table[g_cnf.start, length] == len(words[length]):
            continue
        if any(derivations_of_word(g_cnf, w) > 1 for w in words[length]):
            return False
    return True


def word_to_str(w: Sequence) -> str:
    return "".join(w) if all(len(a) == 1 for a in w) else " ".join(w)
