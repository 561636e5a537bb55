"""Largest-common-subtree computations.

Exact algorithms (dynamic programs over node pairs with a maximum-weight
matching of child subtrees at every step) plus the brute-force oracles
they are validated against.  Plane order never matters here: common
subtrees are counted up to graph isomorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import errors
from ._kernels import (bfs_heights, bfs_kid_start, lcs_rooted_clipped,
                       lcs_unrooted_dp)
from .assignment import max_weight_matching
from .trees import PlaneTree, all_top3_arms, distance_matrix, reroot

DEFAULT_PAIR_BUDGET = 10 ** 8


# ---------------------------------------------------------------------------
# exact rooted / unrooted LCS
# ---------------------------------------------------------------------------

def _bfs_arena(tree: PlaneTree):
    """(kcount, kid_start, heights) in breadth-first layout.

    Sorting preorder ids by (depth, id) gives the BFS numbering in which
    each node's children are contiguous and in plane order, the layout
    the rooted DP kernel expects.
    """
    n = tree.size
    order = np.lexsort((np.arange(n), tree.depth))
    k = (tree.cptr[1:] - tree.cptr[:-1]).astype(np.int64)
    kc = np.ascontiguousarray(k[order])
    ks = bfs_kid_start(kc)
    ht = bfs_heights(kc, ks)
    return kc, ks, ht


def lcs_rooted(t: PlaneTree, tp: PlaneTree,
               pair_budget: int = DEFAULT_PAIR_BUDGET) -> int:
    """Size of the largest common rooted subtree (root maps to root)."""
    kcA, ksA, htA = _bfs_arena(t)
    kcB, ksB, htB = _bfs_arena(tp)
    clip = min(t.size, tp.size) + 1  # no-op clip: exact value
    v = lcs_rooted_clipped(kcA, ksA, htA, kcB, ksB, htB,
                           np.int64(clip), np.int64(pair_budget))
    if v < 0:
        raise errors.ResourceLimit(
            f"rooted LCS exceeded pair budget {pair_budget}")
    return int(v)


def lcs_unrooted(t: PlaneTree, tp: PlaneTree,
                 pair_budget: int = DEFAULT_PAIR_BUDGET) -> int:
    """Size of the largest common (unrooted) subtree.

    Equals max over rootings (v, v') of the rooted LCS; computed with an
    oriented-edge memo so the work is shared across all rootings.
    """
    v = lcs_unrooted_dp(t.parent, t.cptr, t.cidx,
                        tp.parent, tp.cptr, tp.cidx, np.int64(pair_budget))
    if v < 0:
        raise errors.ResourceLimit(
            f"unrooted LCS exceeded pair budget {pair_budget}")
    return int(v)


def lcs_rooted_witness(t: PlaneTree, tp: PlaneTree):
    """(value, pairs): an optimal rooted embedding as (node, node') pairs.

    Pure-Python re-derivation (memoized recursion + matching pairs);
    intended for inspection of moderate inputs, not for bulk runs.
    """
    memo = {}

    def value(u, up):
        key = (u, up)
        if key in memo:
            return memo[key][0]
        cu = [int(c) for c in t.children(u)]
        cv = [int(c) for c in tp.children(up)]
        if not cu or not cv:
            memo[key] = (1, [])
            return 1
        w = np.array([[value(a, b) for b in cv] for a in cu], dtype=np.int64)
        val, pairs = max_weight_matching(w)
        memo[key] = (1 + val, [(cu[i], cv[j]) for i, j in pairs])
        return 1 + val

    total = value(0, 0)
    out = []
    stack = [(0, 0)]
    while stack:
        u, up = stack.pop()
        out.append((u, up))
        for a, b in memo[(u, up)][1]:
            stack.append((a, b))
    return total, out


def lcs_unrooted_witness(t: PlaneTree, tp: PlaneTree):
    """(value, root pair, pairs): an optimal unrooted embedding.

    Scans all rootings with the rooted witness, so it re-derives values
    per root pair; meant for inspecting moderate inputs only.  The pair
    lists are vertex ids of the re-rooted trees returned alongside.
    """
    best = (0, None, None, None, None)
    for v in range(t.size):
        rt = reroot(t, v)
        for vp in range(tp.size):
            rtp = reroot(tp, vp)
            value, pairs = lcs_rooted_witness(rt, rtp)
            if value > best[0]:
                best = (value, (v, vp), pairs, rt, rtp)
    return best[0], best[1], best[2]


# ---------------------------------------------------------------------------
# tripods (largest common Y-shape)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TripodFrontier:
    """Pareto-maximal, descending-sorted arm triples of one tree.

    A sorted triple (a, b, c) is realizable as three internally-disjoint
    arms at a single vertex iff it is componentwise <= some row here.
    """

    triples: np.ndarray

    def dominates(self, triple, tol: float = 1e-12) -> bool:
        t = np.sort(np.asarray(triple, dtype=np.float64))[::-1]
        return bool(np.any(np.all(self.triples >= t - tol, axis=1)))


def tripod_frontier(tree: PlaneTree, scale: float = 1.0) -> TripodFrontier:
    """Frontier of achievable Y-shapes: per vertex the top-3 arm
    capacities (neighbor-component depths padded with 0), Pareto-reduced.
    """
    arms = all_top3_arms(tree).astype(np.float64) * float(scale)
    # dedupe, then sweep in lexicographic descending order; a point is
    # kept iff no kept point dominates it componentwise
    rows = np.unique(arms, axis=0)[::-1]
    kept = []
    for r in rows:
        dominated = False
        for q in kept:
            if (q[0] >= r[0] - 1e-12 and q[1] >= r[1] - 1e-12
                    and q[2] >= r[2] - 1e-12):
                dominated = True
                break
        if not dominated:
            kept.append(r)
    return TripodFrontier(np.array(kept, dtype=np.float64))


def lcs3_length(t: PlaneTree, tp: PlaneTree,
                scale: float = 1.0, scale2: float = 1.0) -> float:
    """Largest total length of a common Y-shaped subtree of the two
    scaled metric trees (degenerate Ys -- paths and points -- included).

    Equals max over frontier rows p, q of sum_i min(p_i, q_i): the best
    common shape at a vertex pair has arms min(p_i, q_i) after sorting.
    """
    if scale <= 0 or scale2 <= 0:
        raise errors.TreeLcsError("scales must be positive")
    f = tripod_frontier(t, scale).triples
    g = tripod_frontier(tp, scale2).triples
    m = np.minimum(f[:, None, :], g[None, :, :]).sum(axis=2)
    return float(m.max())


# ---------------------------------------------------------------------------
# span lengths and the bounded-leaf oracle
# ---------------------------------------------------------------------------

def _span_from_dists(d, pts) -> float:
    """Total length of the subtree spanned by ``pts``, from pairwise
    distances only: L = sum_k (1/2) min_{i,j<k} (d_ik + d_jk - d_ij)."""
    total = 0.0
    for k in range(1, len(pts)):
        best = None
        for i in range(k):
            for j in range(k):
                v = d[pts[i], pts[k]] + d[pts[j], pts[k]] - d[pts[i], pts[j]]
                if best is None or v < best:
                    best = v
        total += 0.5 * best
    return total


def span_length(tree: PlaneTree, vertices) -> float:
    """Length of the subtree of ``tree`` spanned by the listed vertices."""
    for v in vertices:
        tree._check(v)
    if len(vertices) <= 1:
        return 0.0
    d = distance_matrix(tree)
    return _span_from_dists(d, list(vertices))


def lcsN_bruteforce(t: PlaneTree, tp: PlaneTree, N: int) -> float:
    """Max span length over vertex N-tuples with matching pairwise
    distance matrices; exact, oracle scale only (#t, #t' <= 40, N <= 5).
    """
    if t.size > 40 or tp.size > 40 or N > 5:
        raise errors.TooLarge("lcsN_bruteforce is an oracle for small input")
    if N < 1:
        raise errors.TreeLcsError("N must be >= 1")
    if N == 1:
        return 0.0

    def keyed_spans(tree):
        d = distance_matrix(tree)
        out = {}
        for pts in itertools.combinations_with_replacement(range(tree.size), N):
            canon = min(
                tuple(int(d[p[i], p[j]]) for i in range(N)
                      for j in range(i + 1, N))
                for p in itertools.permutations(pts))
            if canon not in out:
                out[canon] = _span_from_dists(d, list(pts))
        return out

    a = keyed_spans(t)
    b = keyed_spans(tp)
    best = 0.0
    for key, span in a.items():
        if key in b and span > best:
            best = span
    return best


# ---------------------------------------------------------------------------
# brute-force oracles (recursive embedding enumeration; no matching solver)
# ---------------------------------------------------------------------------

def lcs_rooted_bruteforce(t: PlaneTree, tp: PlaneTree) -> int:
    """Exhaustive rooted LCS: at every node pair, enumerate all
    injections of child subtrees by bitmask recursion."""
    if t.size * tp.size > 100:
        raise errors.TooLarge("rooted brute force needs #t * #t' <= 100")
    memo = {}

    def best(u, up):
        key = (u, up)
        if key in memo:
            return memo[key]
        cu = t.children(u)
        cv = tp.children(up)
        vals = [[best(int(a), int(b)) for b in cv] for a in cu]

        def go(i, used):
            if i == len(cu):
                return 0
            out = go(i + 1, used)
            for j in range(len(cv)):
                if not used & (1 << j):
                    cand = vals[i][j] + go(i + 1, used | (1 << j))
                    if cand > out:
                        out = cand
            return out

        memo[key] = 1 + go(0, 0)
        return memo[key]

    return best(0, 0)


def lcs_unrooted_bruteforce(t: PlaneTree, tp: PlaneTree) -> int:
    """Exhaustive unrooted LCS: rooted brute force over all rootings."""
    if t.size * tp.size > 100:
        raise errors.TooLarge("unrooted brute force needs #t * #t' <= 100")
    best = 0
    for v in range(t.size):
        rt = reroot(t, v)
        for vp in range(tp.size):
            cand = lcs_rooted_bruteforce(rt, reroot(tp, vp))
            if cand > best:
                best = cand
    return best
