"""Cross-checks between the compiled and pure alignment kernels."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wikimim import _alignment
from wikimim._alignment import _pure, aligned_pairs

try:
    from wikimim._alignment import _speedups
except ImportError:
    _speedups = None

ids = st.lists(st.integers(min_value=0, max_value=6), max_size=25)


def test_backend_reported():
    assert _alignment.BACKEND in ("compiled", "pure")


@pytest.mark.skipif(_speedups is None, reason="extension not built")
@given(ids, ids)
def test_kernels_agree(a, b):
    assert _pure.align_pairs(a, b) == _speedups.align_pairs(a, b)


@given(ids, ids)
def test_pairs_strictly_increasing(a, b):
    pairs = aligned_pairs(a, b)
    assert pairs == sorted(pairs)
    assert len({i for i, _ in pairs}) == len(pairs)
    assert len({j for _, j in pairs}) == len(pairs)


@given(ids, ids)
def test_substitution_count_symmetric(a, b):
    forward = [(i, j) for i, j in aligned_pairs(a, b) if a[i] != b[j]]
    backward = [(j, i) for i, j in aligned_pairs(b, a) if b[i] != a[j]]
    assert sorted(forward) == sorted(backward)


def test_identical_sequences_align_diagonally():
    assert aligned_pairs([1, 2, 3], [1, 2, 3]) == [(0, 0), (1, 1), (2, 2)]


def test_point_substitution_stays_in_place():
    # [q, y] -> [x, q]: both positions replaced; a pure longest-common-
    # subsequence match would cross q over and report no substitutions.
    pairs = aligned_pairs([0, 1], [2, 0])
    assert pairs == [(0, 0), (1, 1)]


def test_adjacent_substitution_with_equal_neighbor():
    # [b, a] -> [b, b]: the edit at index 1 must not steal index 0's b.
    pairs = aligned_pairs([1, 0], [1, 1])
    assert pairs == [(0, 0), (1, 1)]


def test_shifted_copy_prefers_substitutions():
    a = [0, 1, 0, 1, 0]
    b = [1, 0, 1, 0, 1]
    pairs = aligned_pairs(a, b)
    assert pairs == [(i, i) for i in range(5)]


def test_insertion_detected():
    pairs = aligned_pairs([5, 6, 7], [9, 5, 6, 7])
    assert pairs == [(0, 1), (1, 2), (2, 3)]


def test_deletion_detected():
    pairs = aligned_pairs([9, 5, 6, 7], [5, 6, 7])
    assert pairs == [(1, 0), (2, 1), (3, 2)]


def test_empty_inputs():
    assert aligned_pairs([], []) == []
    assert aligned_pairs([1], []) == []
    assert aligned_pairs([], [1]) == []
