# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled token alignment kernel. Mirror of ``_pure.align_pairs``."""

from libc.stdlib cimport free, malloc

DEF MATCH = 10
DEF SUB = 9


def align_pairs(a, b):
    cdef Py_ssize_t m = len(a)
    cdef Py_ssize_t n = len(b)
    if m == 0 or n == 0:
        return []

    cdef long *ca = <long *> malloc(m * sizeof(long))
    cdef long *cb = <long *> malloc(n * sizeof(long))
    # One flat (m+1) x (n+1) score table.
    cdef long *score = <long *> malloc((m + 1) * (n + 1) * sizeof(long))
    if ca == NULL or cb == NULL or score == NULL:
        free(ca)
        free(cb)
        free(score)
        raise MemoryError()

    cdef Py_ssize_t i, j
    cdef long diag, up, left, best, ai
    cdef Py_ssize_t w = n + 1
    try:
        for i in range(m):
            ca[i] = a[i]
        for j in range(n):
            cb[j] = b[j]

        for j in range(w):
            score[j] = 0
        for i in range(1, m + 1):
            score[i * w] = 0
            ai = ca[i - 1]
            for j in range(1, w):
                diag = score[(i - 1) * w + (j - 1)] + (MATCH if ai == cb[j - 1] else SUB)
                up = score[(i - 1) * w + j]
                left = score[i * w + (j - 1)]
                best = diag
                if up > best:
                    best = up
                if left > best:
                    best = left
                score[i * w + j] = best

        pairs = []
        i, j = m, n
        while i > 0 and j > 0:
            diag = score[(i - 1) * w + (j - 1)] + (MATCH if ca[i - 1] == cb[j - 1] else SUB)
            if score[i * w + j] == diag:
                pairs.append((i - 1, j - 1))
                i -= 1
                j -= 1
            elif score[i * w + j] == score[(i - 1) * w + j]:
                i -= 1
            else:
                j -= 1
        pairs.reverse()
        return pairs
    finally:
        free(ca)
        free(cb)
        free(score)
