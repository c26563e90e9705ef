"""Compare the compiled and pure-Python CYK and derivation-counting kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import timeit

from spanalt import _pykernels
from spanalt.generators import random_cnf_grammar
from spanalt.grammar import _index, parse_grammar, to_cnf

try:
    from spanalt import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def workloads():
    catalan = to_cnf(parse_grammar("S -> S S | a | b"))
    rng = random.Random(0)
    dense = random_cnf_grammar(rng, 6, "ab")
    for name, g, n in (("catalan", catalan, 60), ("random6", dense, 40)):
        nts, nid, tid, binary, unary, unary_count, _ = _index(g)
        word = [rng.choice(list(tid.values())) for _ in range(n)]
        yield f"cyk_recognize[{name}, n={n}]", "cyk_recognize", (len(nts), binary, unary, word, nid[g.start])
        yield f"cyk_count[{name}, n={n}]", "cyk_count", (len(nts), binary, unary, word, nid[g.start])
        yield f"length_counts[{name}, n={2 * n}]", "length_counts", (len(nts), binary, unary_count, 2 * n)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<34}" + "".join(f"{b:>12}" for b, _ in backends) + ("     speedup" if _ckernels else ""))
    for label, fn, call_args in workloads():
        times = []
        for _, mod in backends:
            f = getattr(mod, fn)
            result = f(*call_args)
            times.append(min(timeit.repeat(lambda: f(*call_args), number=1, repeat=args.repeat)))
            if mod is not _pykernels:
                assert result == getattr(_pykernels, fn)(*call_args), f"{label}: backends disagree"
        row = f"{label:<34}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
