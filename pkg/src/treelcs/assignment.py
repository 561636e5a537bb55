"""Exact maximum-weight bipartite matching on rectangular integer matrices.

Shortest-augmenting-path (Jonker-Volgenant style) with integer
potentials, so there are no floating-point ties.  This is the inner
solver of the LCS dynamic program; the njit kernel is shared with the
hot loops in :mod:`treelcs._kernels`.
"""

from __future__ import annotations

import numpy as np

from . import errors
from ._kernels import assignment_max


def max_weight_matching(weights):
    """(value, pairs) of a maximum-weight partial matching.

    ``weights`` is a 2D array-like of nonnegative integers.  ``pairs``
    is a list of (row, col) with distinct rows and distinct columns;
    matched pairs of weight 0 are omitted (they cannot change the value).
    """
    w = np.asarray(weights)
    if w.ndim != 2:
        raise errors.TreeLcsError("weight matrix must be 2-dimensional")
    if w.size and np.any(w < 0):
        raise errors.TreeLcsError("weights must be nonnegative")
    nr, nc = w.shape
    if nr == 0 or nc == 0:
        return 0, []
    wi = np.ascontiguousarray(w, dtype=np.int64)
    row_of_col = np.empty(max(nr, nc) + 2, dtype=np.int64)
    value = int(assignment_max(wi.ravel(), nr, nc, row_of_col))
    pairs = [(int(row_of_col[c]), c) for c in range(nc)
             if row_of_col[c] >= 0 and wi[row_of_col[c], c] > 0]
    return value, pairs


def max_weight_matching_bruteforce(weights):
    """Enumerate all injections of the smaller side; oracle for tests."""
    import itertools

    w = np.asarray(weights)
    nr, nc = w.shape if w.ndim == 2 else (0, 0)
    if nr == 0 or nc == 0:
        return 0
    if nr > nc:
        w = w.T
        nr, nc = nc, nr
    best = 0
    for cols in itertools.permutations(range(nc), nr):
        best = max(best, int(sum(w[i, cols[i]] for i in range(nr))))
    return best
