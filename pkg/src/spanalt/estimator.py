"""Monte-Carlo word counting by importance-weighted uniform derivation sampling.

A derivation tree of length ``n`` is drawn uniformly (top-down, rule choices
weighted by derivation counts).  The word ``w`` it yields appears with
probability ``d(w) / D_n``, so ``D_n / d(w)`` is an unbiased estimate of
``|L_n|``.  This is exact on unambiguous grammars, but the variance is not
bounded in general: it is NOT an FPRAS.

Randomness: sample ``i`` at length ``n`` under seed ``s`` uses its own
``random.Random`` seeded from a BLAKE2b digest of ``(s, n, i)``, so results
do not depend on evaluation order.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ValidationError
from .grammar import Grammar, count_derivations, derivations_of_word, to_cnf


@dataclass(frozen=True)
class Estimate:
    value: float
    samples: int
    std_error: float
    seed: int

    def as_dict(self) -> dict:
        return {"value": self.value, "samples": self.samples,
                "std_error": self.std_error, "seed": self.seed}


def sample_rng(seed: int, length: int, index: int) -> random.Random:
    digest = hashlib.blake2b(f"{seed}:{length}:{index}".encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _weighted_choice(rng: random.Random, options: list, total: int):
    r = rng.randrange(total)
    for weight, item in options:
        if r < weight:
            return item
        r -= weight
    raise AssertionError("weights do not sum to total")  # pragma: no cover


def _draw(g_cnf: Grammar, table, n: int, rng: random.Random) -> tuple:
    if n == 0:
        return ()
    out = []
    stack = [(g_cnf.start, n)]
    while stack:
        head, length = stack.pop()
        options = []
        for body in g_cnf.rules_for(head):
            if len(body) == 1 and length == 1:
                options.append((1, (body[0],)))
            elif len(body) == 2:
                for l1 in range(1, length):
                    weight = table[body[0], l1] * table[body[1], length - l1]
                    if weight:
                        options.append((weight, (body, l1)))
        choice = _weighted_choice(rng, options, table[head, length])
        if len(choice) == 1:
            out.append(choice[0])
        else:
            (b, c), l1 = choice
            stack.append((c, length - l1))
            stack.append((b, l1))
    return tuple(out)


def sample_derivation(g_cnf: Grammar, n: int, seed, table=None) -> Optional[tuple]:
    """A word drawn via a uniformly random derivation tree of length ``n``; ``None`` if there is none."""
    table = table or count_derivations(g_cnf, n)
    if table[g_cnf.start, n] == 0:
        return None
    rng = seed if isinstance(seed, random.Random) else sample_rng(seed, n, 0)
    return _draw(g_cnf, table, n, rng)


def _length_terms(g_cnf: Grammar, table, n: int, samples: int, seed: int) -> list:
    total = table[g_cnf.start, n]
    if total == 0:
        return [Fraction(0)] * samples
    cache: dict = {}
    terms = []
    for i in range(samples):
        w = _draw(g_cnf, table, n, sample_rng(seed, n, i))
        if w not in cache:
            cache[w] = derivations_of_word(g_cnf, w)
        terms.append(Fraction(total, cache[w]))
    return terms


def _summarise(terms: list) -> tuple:
    k = len(terms)
    mean = sum(terms, Fraction(0)) / k
    if k < 2:
        return mean, Fraction(0)
    var = sum(((t - mean) ** 2 for t in terms), Fraction(0)) / (k - 1)
    return mean, var / k


def estimate_count_words(g: Grammar, n: int, samples: int, seed: int) -> Estimate:
    """Unbiased estimate of ``|L_n(g)|`` from ``samples`` derivation draws."""
    if samples < 1:
        raise ValidationError("samples must be at least 1")
    g_cnf = to_cnf(g)
    table = count_derivations(g_cnf, n)
    mean, var_of_mean = _summarise(_length_terms(g_cnf, table, n, samples, seed))
    return Estimate(float(mean), samples, math.sqrt(var_of_mean), seed)


def estimate_count_upto(g: Grammar, n: int, samples_per_length: int, seed: int) -> Estimate:
    """Sum of per-length estimates for lengths ``0..n``; standard errors add in quadrature."""
    if samples_per_length < 1:
        raise ValidationError("samples must be at least 1")
    g_cnf = to_cnf(g)
    table = count_derivations(g_cnf, n)
    value = Fraction(0)
    variance = Fraction(0)
    for length in range(n + 1):
        mean, var_of_mean = _summarise(
            _length_terms(g_cnf, table, length, samples_per_length, seed))
        value += mean
        variance += var_of_mean
    return Estimate(float(value), samples_per_length * (n + 1), math.sqrt(variance), seed)
