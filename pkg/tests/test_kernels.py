import itertools
import os
import random
import subprocess
import sys
from math import comb

import pytest

from spanalt import _kernels, _pykernels
from spanalt.generators import random_cnf_grammar
from spanalt.grammar import _index

ckernels = pytest.importorskip("spanalt._ckernels")


def indexed(g):
    nts, nid, tid, binary, unary, unary_count, _ = _index(g)
    return len(nts), binary, unary, unary_count, nid[g.start], len(tid)


def random_indexed(seed, count):
    rng = random.Random(seed)
    for _ in range(count):
        yield indexed(random_cnf_grammar(rng, rng.randint(1, 6), "abc"[:rng.randint(1, 3)]))


def test_backend_follows_environment():
    forced = os.environ.get("SPANALT_PURE_PYTHON", "") not in ("", "0")
    assert _kernels.BACKEND == ("python" if forced else "cython")


@pytest.mark.parametrize("flag, expected", [("1", "python"), ("0", "cython"), ("", "cython")])
def test_backend_selection(flag, expected):
    env = {**os.environ, "SPANALT_PURE_PYTHON": flag}
    out = subprocess.run([sys.executable, "-c", "from spanalt import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected


def test_recognize_and_count_agree():
    for n_nt, binary, unary, _, start, n_t in random_indexed(21, 40):
        for length in range(1, 6):
            for word in itertools.product(range(n_t), repeat=length):
                word = list(word)
                assert (ckernels.cyk_recognize(n_nt, binary, unary, word, start)
                        == _pykernels.cyk_recognize(n_nt, binary, unary, word, start))
                assert (ckernels.cyk_count(n_nt, binary, unary, word, start)
                        == _pykernels.cyk_count(n_nt, binary, unary, word, start))


def test_length_counts_agree():
    for n_nt, binary, _, unary_count, _, _ in random_indexed(22, 40):
        for n in (0, 1, 7, 15):
            assert (ckernels.length_counts(n_nt, binary, unary_count, n)
                    == _pykernels.length_counts(n_nt, binary, unary_count, n))


def test_large_counts_do_not_overflow():
    # S -> S S | a: a^n has Catalan(n - 1) derivations, far past 64 bits here
    binary, unary_count = [(0, 0, 0)], [1]
    c = ckernels.length_counts(1, binary, unary_count, 40)
    assert c == _pykernels.length_counts(1, binary, unary_count, 40)
    assert c[0][40] == comb(78, 39) // 40
    assert ckernels.cyk_count(1, binary, [[0]], [0] * 70, 0) == comb(138, 69) // 70


def test_empty_word():
    assert not ckernels.cyk_recognize(1, [], [[0]], [], 0)
    assert ckernels.cyk_count(1, [], [[0]], [], 0) == 0
