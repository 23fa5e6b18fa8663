#!/usr/bin/env python3
"""Benchmark the compiled alignment kernel against the pure-Python fallback.

Builds synthetic revision pairs (long token streams with a few scattered
word replacements) and times the alignment kernel both ways.  This is the
quadratic hot loop behind diff_revisions, so article-sized inputs are where
the extension pays off.

Usage:  python benchmarks/bench_alignment.py [n_tokens ...]
"""

import random
import sys
import time

from wikimim._alignment import BACKEND, _pure

try:
    from wikimim._alignment import _speedups
except ImportError:
    _speedups = None


def make_pair(n: int, substitutions: int, rng: random.Random):
    vocab = 400
    old = [rng.randrange(vocab) for _ in range(n)]
    new = list(old)
    for index in rng.sample(range(n), substitutions):
        new[index] = rng.randrange(vocab, vocab + 50)
    return old, new


def timed(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv):
    sizes = [int(a) for a in argv] or [200, 800, 1600]
    rng = random.Random(1)
    print("active backend: %s" % BACKEND)
    if _speedups is None:
        print("compiled extension not available; timing the fallback only")
    print("%8s %12s %12s %10s" % ("tokens", "pure (s)", "compiled (s)", "speedup"))
    for n in sizes:
        old, new = make_pair(n, max(2, n // 100), rng)
        t_pure, pairs_pure = timed(_pure.align_pairs, old, new)
        if _speedups is not None:
            t_fast, pairs_fast = timed(_speedups.align_pairs, old, new)
            assert pairs_pure == pairs_fast, "backends disagree"
            print("%8d %12.4f %12.4f %9.1fx" % (n, t_pure, t_fast, t_pure / t_fast))
        else:
            print("%8d %12.4f %12s %10s" % (n, t_pure, "-", "-"))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
