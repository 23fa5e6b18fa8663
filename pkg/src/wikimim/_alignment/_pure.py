"""Pure-Python token alignment kernel.

Aligns two integer sequences with a substitution-friendly variant of the
classic LCS dynamic program: a diagonal step scores MATCH for equal ids and
SUB for unequal ids, gaps score nothing.  Because SUB is nearly as good as
MATCH, one-for-one replacements stay paired with their original position
instead of being torn into an insert/delete pair whenever the replacement
word happens to occur nearby.  The backtrack prefers diagonal steps, then
up (deletion), then left (insertion), which makes the result deterministic.

Must stay behaviourally identical to ``_speedups.pyx``; the test suite
cross-checks the two implementations on random inputs.
"""

from __future__ import annotations

from collections.abc import Sequence

MATCH = 10
SUB = 9


def align_pairs(a: Sequence[int], b: Sequence[int]) -> list[tuple[int, int]]:
    """Return (i, j) index pairs for every diagonal step of the best path.

    Pairs are strictly increasing in both coordinates.  A pair with
    ``a[i] == b[j]`` is a kept token, otherwise it is a one-for-one
    replacement.  Unpaired indices are deletions (in ``a``) or insertions
    (in ``b``).
    """
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        return []

    score = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        row = score[i]
        prev = score[i - 1]
        ai = a[i - 1]
        for j in range(1, n + 1):
            diag = prev[j - 1] + (MATCH if ai == b[j - 1] else SUB)
            up = prev[j]
            left = row[j - 1]
            best = diag
            if up > best:
                best = up
            if left > best:
                best = left
            row[j] = best

    pairs: list[tuple[int, int]] = []
    i, j = m, n
    while i > 0 and j > 0:
        diag = score[i - 1][j - 1] + (MATCH if a[i - 1] == b[j - 1] else SUB)
        if score[i][j] == diag:
            pairs.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif score[i][j] == score[i - 1][j]:
            i -= 1
        else:
            j -= 1
    pairs.reverse()
    return pairs
