"""Random generation of every tree law used in the lab.

Samplers are pure functions of (law, parameters, rng stream): the same
Rng always reproduces the same tree, and parallel Monte Carlo assigns
one stream per replicate.  Node caps make heavy-tailed draws safe; a
capped tree is returned with ``censored = True`` and is a subtree of the
uncensored realization (callers must treat it as right-censored, never
drop it silently).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import errors
from ._kernels import bgw_steps, conditioned_steps, steps_to_parents
from ._rng import Rng, rng_new
from .offspring import OffspringLaw, exact_size_law
from .trees import PlaneTree

__all__ = ["Rng", "SpineTree", "sample_bgw", "sample_conditioned",
           "sample_root_biased", "sample_spine", "rejection_budget",
           "enumerate_plane_trees", "conditional_tree_law", "packed_key",
           "DEFAULT_NODE_CAP"]

DEFAULT_NODE_CAP = 10 ** 7

_NO_TABLE = (np.empty(1, dtype=np.float64), np.empty(1, dtype=np.int64))


def _kernel_state(rng: Rng, task: int = 0):
    k0, k1 = rng.kernel_key()
    return rng_new(k0, k1, np.uint64(task))


def _tree_from_steps(steps, censored):
    if censored:
        # close every open slot with leaves: the result is the subtree of
        # the true realization spanned by the first `cap` DFS nodes
        alive = 1 + int(steps.sum())
        steps = np.concatenate([steps, np.full(alive, -1, dtype=np.int64)])
    parent = steps_to_parents(np.asarray(steps, dtype=np.int64))
    tree = PlaneTree(parent)
    tree.censored = bool(censored)
    return tree


def sample_bgw(law: OffspringLaw, rng: Rng,
               cap: int = DEFAULT_NODE_CAP) -> PlaneTree:
    """One Bienayme tree with offspring law ``law`` (critical or
    subcritical), truncated at ``cap`` nodes with the censored flag set."""
    if law.mean > 1.0 + 1e-9:
        raise errors.NotCritical("sample_bgw needs a (sub)critical law")
    prob, alias = law.sampler_table()
    steps, censored = bgw_steps(_kernel_state(rng), prob, alias,
                                *_NO_TABLE, False, np.int64(cap))
    return _tree_from_steps(steps, censored)


def sample_root_biased(law: OffspringLaw, rng: Rng,
                       cap: int = DEFAULT_NODE_CAP) -> PlaneTree:
    """Root-biased tree: root degree law (k+1)mu(k+1), i.i.d. Bienayme
    subtrees above the root's children."""
    prob, alias = law.sampler_table()
    rprob, ralias = law.root_biased_table()
    steps, censored = bgw_steps(_kernel_state(rng), prob, alias,
                                rprob, ralias, True, np.int64(cap))
    return _tree_from_steps(steps, censored)


def rejection_budget(law: OffspringLaw, n: int) -> int:
    """Default attempt budget of the conditioned sampler: by the local
    limit theorem the acceptance rate is ~ gcd / (c sqrt(n))."""
    return 50 * math.isqrt(n - 1 if n > 1 else 1) * law.support_gcd + 50


def supports_size(law: OffspringLaw, n: int) -> bool:
    """Whether P(#tree = n) > 0."""
    if n < 1:
        return False
    if (n - 1) % law.support_gcd != 0:
        return False
    if n <= 64:
        return exact_size_law(law, n)[n] > 0.0
    return True


def sample_conditioned(law: OffspringLaw, n: int, rng: Rng,
                       max_attempts: int | None = None) -> PlaneTree:
    """One tree with exactly n vertices, by rejection + cycle lemma.

    Draw n i.i.d. offspring values, reject unless they sum to n - 1,
    then rotate the step sequence to start just after the first global
    minimum of its partial sums (the unique valid rotation by Dwass's
    lemma) and decode.
    """
    if not law.critical:
        raise errors.NotCritical("conditioned sampling needs a critical law")
    if not supports_size(law, n):
        raise errors.UnsupportedSize(f"P(#tree = {n}) = 0 for {law.name}")
    budget = rejection_budget(law, n) if max_attempts is None else max_attempts
    prob, alias = law.sampler_table()
    steps, attempts = conditioned_steps(_kernel_state(rng), np.int64(n),
                                        prob, alias, np.int64(budget))
    if attempts < 0:
        raise errors.Timeout(
            f"no size-{n} sample within {budget} attempts ({law.name})")
    return _tree_from_steps(steps, False)


# ---------------------------------------------------------------------------
# spine (size-biased) trees
# ---------------------------------------------------------------------------

@dataclass
class SpineTree:
    """A size-biased tree truncated at spine height H.

    ``spine`` lists the vertex ids of U_0 = root .. U_H; off-spine
    subtrees are complete (capped) Bienayme trees, and ``trims[i]`` for
    i = 1..H is Trim_{U_i}: independent root-biased trees.  Below U_H
    the size-biased continuation is replaced by a plain Bienayme subtree
    (at H = 0 the whole tree is an unconditioned sample), which leaves
    every Trim/Cut functional below height H unchanged.
    """

    tree: PlaneTree
    spine: list
    trims: list

    def cut_at_tip(self) -> PlaneTree:
        """Cut_{U_H}: drop everything below the last spine vertex."""
        from .trees import cut_at
        return cut_at(self.tree, self.spine[-1])


def _graft(children: list) -> PlaneTree:
    """Fresh root with the given trees as child subtrees, in order."""
    total = 1 + sum(t.size for t in children)
    parent = np.empty(total, dtype=np.int64)
    parent[0] = -1
    off = 1
    for t in children:
        parent[off:off + t.size] = np.where(t.parent < 0, 0, t.parent + off)
        off += t.size
    return PlaneTree(parent)


def sample_spine(law: OffspringLaw, height: int, rng: Rng,
                 cap: int = DEFAULT_NODE_CAP) -> SpineTree:
    """Size-biased (spine) tree truncated at the given spine height.

    Along the spine, (k, j) is drawn with P(k, j) = 1{j <= k} mu(k)/m:
    k from the size-biased offspring law, j uniform among the k children.
    """
    if not law.critical:
        raise errors.NotCritical("spine sampling needs a critical law")
    gen = rng.generator()
    sprob, salias = law.size_biased_table()

    def size_biased_draw():
        j = int(gen.integers(sprob.size))
        if gen.random() < sprob[j]:
            return j
        return int(salias[j])

    levels = []  # per spine level: (j, [subtrees of the other children])
    for i in range(height):
        k = size_biased_draw()
        j = int(gen.integers(k)) + 1  # spine child position, 1-based
        subs = [sample_bgw(law, rng.child("off", i, c), cap)
                for c in range(k - 1)]
        levels.append((j, k, subs))
    # continuation at U_H: a plain Bienayme subtree
    current = sample_bgw(law, rng.child("tip"), cap)
    trims_blueprint = []
    for i in range(height - 1, -1, -1):
        j, k, subs = levels[i]
        kids = subs[:j - 1] + [current] + subs[j - 1:]
        trims_blueprint.append(subs)
        current = _graft(kids)
    trims_blueprint.reverse()
    tree = current
    # recover spine ids by walking the recorded child positions
    spine = [0]
    for i in range(height):
        j = levels[i][0]
        spine.append(int(tree.children(spine[-1])[j - 1]))
    trims = [None] + [_graft(subs) for subs in trims_blueprint]
    return SpineTree(tree=tree, spine=spine, trims=trims)


# ---------------------------------------------------------------------------
# exact enumeration oracles
# ---------------------------------------------------------------------------

def enumerate_plane_trees(n: int) -> list:
    """All parenthesis strings of plane trees with n vertices (Catalan
    many): a root plus an ordered forest of total size n - 1."""
    tree_cache = {1: ["()"]}
    forest_cache = {0: [""]}

    def trees(m):
        if m not in tree_cache:
            tree_cache[m] = ["(" + f + ")" for f in forests(m - 1)]
        return tree_cache[m]

    def forests(m):
        if m not in forest_cache:
            res = []
            for first in range(1, m + 1):
                for head in trees(first):
                    for rest in forests(m - first):
                        res.append(head + rest)
            forest_cache[m] = res
        return forest_cache[m]

    return trees(n)


def tree_probability(law: OffspringLaw, tree: PlaneTree) -> float:
    """P(Bienayme sample equals this plane tree) = prod_u mu(k_u)."""
    k = tree.cptr[1:] - tree.cptr[:-1]
    if np.any(k >= law.pmf.size):
        return 0.0
    return float(np.prod(law.pmf[k]))


def conditional_tree_law(law: OffspringLaw, n: int) -> dict:
    """Exact conditional law given size n: {packed key: probability}."""
    from .trees import parse
    q = exact_size_law(law, n)[n]
    if q <= 0:
        raise errors.UnsupportedSize(f"P(#tree = {n}) = 0 for {law.name}")
    out = {}
    for s in enumerate_plane_trees(n):
        t = parse(s)
        p = tree_probability(law, t)
        if p > 0:
            out[packed_key(t)] = p / q
    return out


def packed_key(tree: PlaneTree) -> int:
    """4-bit packed preorder out-degrees (n <= 15); matches the kernel's
    conditioned-sampler keys."""
    if tree.size > 15:
        raise errors.TooLarge("packed keys need n <= 15")
    key = 0
    k = tree.cptr[1:] - tree.cptr[:-1]
    for i, ki in enumerate(k):
        key |= int(ki) << (4 * i)
    return key
