import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from treelcs.assignment import (max_weight_matching,
                                max_weight_matching_bruteforce)


def test_examples():
    assert max_weight_matching([[7]])[0] == 7
    assert max_weight_matching([[3, 1], [1, 3]])[0] == 6
    assert max_weight_matching([[5, 2, 3]])[0] == 5
    assert max_weight_matching([[0, 0], [0, 0]]) == (0, [])
    assert max_weight_matching(np.zeros((0, 3), dtype=int)) == (0, [])


def test_pairs_are_a_matching():
    gen = np.random.default_rng(5)
    for _ in range(300):
        w = gen.integers(0, 21, size=(int(gen.integers(1, 7)),
                                      int(gen.integers(1, 7))))
        value, pairs = max_weight_matching(w)
        rows = [r for r, _ in pairs]
        cols = [c for _, c in pairs]
        assert len(set(rows)) == len(rows)
        assert len(set(cols)) == len(cols)
        assert value == sum(int(w[r, c]) for r, c in pairs)


def test_against_bruteforce():
    gen = np.random.default_rng(11)
    for _ in range(1500):
        nr = int(gen.integers(1, 7))
        nc = int(gen.integers(1, 8))
        w = gen.integers(0, 21, size=(nr, nc))
        assert max_weight_matching(w)[0] == max_weight_matching_bruteforce(w)


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 30), min_size=c,
                                    max_size=c), min_size=r, max_size=r)))


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_transpose_symmetry(rows):
    w = np.array(rows)
    assert max_weight_matching(w)[0] == max_weight_matching(w.T)[0]


@given(matrices, st.integers(0, 10))
@settings(max_examples=100, deadline=None)
def test_monotone_in_entries(rows, bump):
    w = np.array(rows)
    v0 = max_weight_matching(w)[0]
    w2 = w.copy()
    w2[0, 0] += bump
    assert max_weight_matching(w2)[0] >= v0


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_zero_padding_invariance(rows):
    w = np.array(rows)
    v0 = max_weight_matching(w)[0]
    padded = np.zeros((w.shape[0] + 2, w.shape[1] + 1), dtype=w.dtype)
    padded[:w.shape[0], :w.shape[1]] = w
    assert max_weight_matching(padded)[0] == v0
