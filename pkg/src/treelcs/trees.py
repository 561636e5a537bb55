"""Plane trees: arena storage, Lukasiewicz coding, and structural operators.

Nodes are dense integer ids in depth-first preorder (the root is 0 and
the subtree of u occupies the contiguous id range [u, u + subtree_size)),
children are kept in plane order, and trees are immutable: every
operator returns a fresh tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import errors
from ._kernels import (children_csr, depths_from_parents, steps_to_parents,
                       subtree_heights, subtree_sizes, top3_arms, up_heights)


@dataclass(frozen=True)
class LukasiewiczPath:
    """Integer step sequence (offspring counts minus one) of a plane tree.

    Partial sums stay nonnegative strictly before the last index and the
    final partial sum is -1.
    """

    steps: np.ndarray

    def __post_init__(self):
        steps = np.asarray(self.steps, dtype=np.int64)
        object.__setattr__(self, "steps", steps)
        steps.setflags(write=False)
        if steps.size == 0:
            raise errors.InvalidPath("empty step sequence")
        run = np.cumsum(steps)
        if np.any(steps < -1) or run[-1] != -1 or np.any(run[:-1] < 0):
            raise errors.InvalidPath(f"partial-sum violation in {steps}")

    def __len__(self):
        return int(self.steps.size)


class PlaneTree:
    """Rooted plane tree in a preorder arena."""

    __slots__ = ("parent", "cptr", "cidx", "depth", "subsize",
                 "_height", "_maxdeg", "censored")

    def __init__(self, parent):
        parent = np.ascontiguousarray(parent, dtype=np.int64)
        n = parent.size
        if n == 0 or parent[0] != -1:
            raise errors.TreeLcsError("arena must have root 0 with parent -1")
        if n > 1 and (np.any(parent[1:] < 0) or np.any(parent[1:] >= np.arange(1, n))):
            raise errors.TreeLcsError("parents must precede children "
                                      "(preorder arena)")
        self.parent = parent
        self.cptr, self.cidx = children_csr(parent)
        self.depth = depths_from_parents(parent)
        self.subsize = subtree_sizes(parent)
        self._height = None
        self._maxdeg = None
        self.censored = False
        for a in (self.parent, self.cptr, self.cidx, self.depth, self.subsize):
            a.setflags(write=False)

    # -- basic accessors ----------------------------------------------------

    @property
    def size(self) -> int:
        return int(self.parent.size)

    @property
    def root(self) -> int:
        return 0

    @property
    def height(self) -> int:
        if self._height is None:
            self._height = int(self.depth.max())
        return self._height

    @property
    def max_outdegree(self) -> int:
        if self._maxdeg is None:
            self._maxdeg = int(np.max(self.cptr[1:] - self.cptr[:-1]))
        return self._maxdeg

    def k(self, u) -> int:
        """Out-degree of u."""
        self._check(u)
        return int(self.cptr[u + 1] - self.cptr[u])

    def children(self, u):
        self._check(u)
        return self.cidx[self.cptr[u]:self.cptr[u + 1]]

    def degree(self, u) -> int:
        """Graph degree (children plus parent edge)."""
        return self.k(u) + (0 if u == 0 else 1)

    def _check(self, u):
        if not 0 <= u < self.size:
            raise errors.NodeNotFound(f"node {u} not in tree of size "
                                      f"{self.size}")

    def __eq__(self, other):
        return (isinstance(other, PlaneTree)
                and np.array_equal(self.parent, other.parent))

    def __hash__(self):
        return hash(self.parent.tobytes())

    def __repr__(self):
        if self.size <= 24:
            return f"PlaneTree({serialize(self)!r})"
        return f"PlaneTree(size={self.size}, height={self.height})"


class OrientedSubtree(NamedTuple):
    """The component of ``v`` once edge {u, v} is cut, rooted at v.

    Memo key of the unrooted LCS dynamic program; identified by the
    directed edge (u, v).
    """

    tree: PlaneTree
    u: int
    v: int

    def validate(self):
        t = self.tree
        t._check(self.u)
        t._check(self.v)
        if t.parent[self.v] != self.u and t.parent[self.u] != self.v:
            raise errors.TreeLcsError(f"({self.u}, {self.v}) is not an edge")
        return self

    def materialize(self) -> PlaneTree:
        self.validate()
        t = self.tree
        if t.parent[self.v] == self.u:
            return subtree_at(t, self.v)
        # up edge: drop the subtree at u entirely, re-root what is left
        # at v (v = parent(u) precedes u, so its id is unchanged)
        lo, hi = self.u, self.u + int(t.subsize[self.u])
        keep = np.concatenate([np.arange(lo), np.arange(hi, t.size)])
        remap = np.full(t.size, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        parent = np.where(keep == 0, -1, remap[t.parent[keep]])
        return reroot(PlaneTree(parent), int(remap[self.v]))


# ---------------------------------------------------------------------------
# Lukasiewicz coding
# ---------------------------------------------------------------------------

def decode_lukasiewicz(path: LukasiewiczPath) -> PlaneTree:
    """Tree whose preorder out-degrees are steps + 1."""
    steps = path.steps if isinstance(path, LukasiewiczPath) \
        else LukasiewiczPath(np.asarray(path)).steps
    parent = steps_to_parents(np.asarray(steps, dtype=np.int64))
    if parent.size == 0:
        raise errors.InvalidPath(f"invalid step sequence {steps}")
    return PlaneTree(parent)


def encode_lukasiewicz(tree: PlaneTree) -> LukasiewiczPath:
    """Inverse of decode (ids are already preorder, so this is k - 1)."""
    k = (tree.cptr[1:] - tree.cptr[:-1]).astype(np.int64)
    return LukasiewiczPath(k - 1)


# ---------------------------------------------------------------------------
# structural operators
# ---------------------------------------------------------------------------

def subtree_at(tree: PlaneTree, u) -> PlaneTree:
    """theta_u: the subtree rooted at u, as a fresh tree."""
    tree._check(u)
    hi = u + int(tree.subsize[u])
    parent = tree.parent[u:hi] - u
    parent = parent.copy()
    parent[0] = -1
    return PlaneTree(parent)

def cut_at(tree: PlaneTree, u) -> PlaneTree:
    """Cut_u: the tree with everything strictly below u removed."""
    tree._check(u)
    lo, hi = u + 1, u + int(tree.subsize[u])
    keep = np.concatenate([np.arange(lo), np.arange(hi, tree.size)])
    remap = np.full(tree.size, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    parent = np.where(keep == 0, -1, remap[tree.parent[keep]])
    return PlaneTree(parent)


def trim_at(tree: PlaneTree, u) -> PlaneTree:
    """Trim_u: the subtree at parent(u) with the subtree at u removed."""
    tree._check(u)
    if u == 0:
        raise errors.RootHasNoTrim("the root has no parent to trim from")
    p = int(tree.parent[u])
    plo, phi = p, p + int(tree.subsize[p])
    lo, hi = u, u + int(tree.subsize[u])
    keep = np.concatenate([np.arange(plo, lo), np.arange(hi, phi)])
    remap = np.full(tree.size, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    parent = np.where(keep == p, -1, remap[tree.parent[keep]])
    return PlaneTree(parent)


def reroot(tree: PlaneTree, v) -> PlaneTree:
    """The same unrooted graph re-rooted at v.

    Plane order of the result: at each vertex the original children keep
    their order and the original parent direction, when it becomes a
    child, is appended last.  Re-rooting at the root returns an equal
    tree.
    """
    tree._check(v)
    if v == 0:
        return PlaneTree(tree.parent.copy())
    n = tree.size
    new_parent = np.empty(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    newid = np.empty(n, dtype=np.int64)
    # iterative DFS over the undirected graph from v
    stack = [(int(v), -1)]
    m = 0
    while stack:
        node, par_new = stack.pop()
        newid[node] = m
        order[m] = node
        new_parent[m] = par_new
        me = m
        m += 1
        nbrs = []
        for c in tree.children(node):
            nbrs.append(int(c))
        if node != 0:
            nbrs.append(int(tree.parent[node]))
        skip = order[par_new] if par_new >= 0 else -1
        # push in reverse so DFS visits in plane order
        for w in reversed([x for x in nbrs if x != skip]):
            stack.append((w, me))
    return PlaneTree(new_parent)


def neighbor_component_depths(tree: PlaneTree, v):
    """Descending arm capacities at v: for each neighbor w, one plus the
    height of w's component in tree - v."""
    tree._check(v)
    htd = subtree_heights(tree.parent)
    hup = up_heights(tree.parent, tree.cptr, tree.cidx, htd)
    arms = [1 + int(htd[c]) for c in tree.children(v)]
    if v != 0:
        arms.append(1 + int(hup[v]))
    return sorted(arms, reverse=True)


def all_top3_arms(tree: PlaneTree) -> np.ndarray:
    """(n, 3) array of each vertex's three largest arm capacities."""
    htd = subtree_heights(tree.parent)
    hup = up_heights(tree.parent, tree.cptr, tree.cidx, htd)
    return top3_arms(tree.parent, tree.cptr, tree.cidx, htd, hup)


def distance_matrix(tree: PlaneTree) -> np.ndarray:
    """All-pairs graph distances (small trees only; oracle helper)."""
    n = tree.size
    d = np.zeros((n, n), dtype=np.int64)
    depth = tree.depth
    # LCA by parent chasing; fine for oracle-scale trees
    for a in range(n):
        for b in range(a + 1, n):
            x, y = a, b
            while x != y:
                if depth[x] >= depth[y]:
                    x = int(tree.parent[x])
                else:
                    y = int(tree.parent[y])
            d[a, b] = d[b, a] = depth[a] + depth[b] - 2 * depth[x]
    return d


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------

def serialize(tree: PlaneTree) -> str:
    """Nested parentheses, one () pair per vertex, children in plane order."""
    out = []
    stack = [(0, False)]
    while stack:
        node, closing = stack.pop()
        if closing:
            out.append(")")
            continue
        out.append("(")
        stack.append((node, True))
        for c in reversed(tree.children(node)):
            stack.append((int(c), False))
    return "".join(out)


def parse(text: str) -> PlaneTree:
    """Inverse of serialize; raises ParseError with the byte offset."""
    parents = []
    stack = []
    for i, ch in enumerate(text):
        if ch == "(":
            parents.append(stack[-1] if stack else -1)
            if len(parents) > 1 and not stack:
                raise errors.ParseError("second root", i)
            stack.append(len(parents) - 1)
        elif ch == ")":
            if not stack:
                raise errors.ParseError("unmatched ')'", i)
            stack.pop()
        elif not ch.isspace():
            raise errors.ParseError(f"unexpected character {ch!r}", i)
    if stack:
        raise errors.ParseError("unclosed '('", len(text))
    if not parents:
        raise errors.ParseError("empty input", 0)
    return PlaneTree(np.array(parents, dtype=np.int64))


def to_parent_list(tree: PlaneTree):
    """JSON form: parent index per node, -1 for the root."""
    return [int(x) for x in tree.parent]


def from_parent_list(parents) -> PlaneTree:
    """Build from a parent array in any order (children sorted by id)."""
    parents = list(parents)
    n = len(parents)
    roots = [i for i, p in enumerate(parents) if p == -1]
    if len(roots) != 1:
        raise errors.TreeLcsError(f"need exactly one root, got {len(roots)}")
    kids = [[] for _ in range(n)]
    for i, p in enumerate(parents):
        if p != -1:
            if not 0 <= p < n:
                raise errors.TreeLcsError(f"parent {p} out of range")
            kids[p].append(i)
    # normalize to preorder
    new_parent = np.empty(n, dtype=np.int64)
    stack = [(roots[0], -1)]
    m = 0
    while stack:
        node, par = stack.pop()
        new_parent[m] = par
        me = m
        m += 1
        for c in reversed(kids[node]):
            stack.append((c, me))
    if m != n:
        raise errors.TreeLcsError("parent array is not a tree (cycle?)")
    return PlaneTree(new_parent)
