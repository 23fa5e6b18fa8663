"""Token alignment core: compiled kernel with a pure-Python fallback.

``aligned_pairs`` is the interface the rest of the package uses.  It trims
the common prefix/suffix (revision diffs are usually sparse) and evaluates
the kernel in a canonical orientation so that swapping the two inputs yields
the mirror-image alignment — the diff symmetry tests rely on that.
"""

from __future__ import annotations

from collections.abc import Sequence

try:
    from wikimim._alignment._speedups import align_pairs

    BACKEND = "compiled"
except ImportError:  # extension not built on this install
    from wikimim._alignment._pure import align_pairs

    BACKEND = "pure"

__all__ = ["BACKEND", "align_pairs", "aligned_pairs"]


def aligned_pairs(a: Sequence[int], b: Sequence[int]) -> list[tuple[int, int]]:
    """Aligned (i, j) index pairs between two id sequences."""
    m, n = len(a), len(b)
    prefix = 0
    limit = min(m, n)
    while prefix < limit and a[prefix] == b[prefix]:
        prefix += 1
    suffix = 0
    while suffix < limit - prefix and a[m - 1 - suffix] == b[n - 1 - suffix]:
        suffix += 1

    mid_a = a[prefix : m - suffix]
    mid_b = b[prefix : n - suffix]
    if tuple(mid_a) <= tuple(mid_b):
        mid_pairs = align_pairs(mid_a, mid_b)
    else:
        mid_pairs = [(ai, bi) for bi, ai in align_pairs(mid_b, mid_a)]

    pairs = [(i, i) for i in range(prefix)]
    pairs.extend((i + prefix, j + prefix) for i, j in mid_pairs)
    pairs.extend((m - suffix + k, n - suffix + k) for k in range(suffix))
    return pairs
