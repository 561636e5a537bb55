"""Numba kernels: samplers, assignment solver, and the LCS dynamic programs.

Everything here is deterministic given a Philox key and task index, so
Monte-Carlo loops can be chunked arbitrarily without changing results.

Tree layout conventions used by the kernels:

* BFS arena: nodes indexed in breadth-first order; ``kcount[i]`` is the
  offspring count of node ``i`` and the children of node ``i`` are the
  contiguous ids ``kid_start[i] .. kid_start[i] + kcount[i]`` where
  ``kid_start`` is one plus the exclusive prefix sum of ``kcount``.
* Preorder arena: nodes in depth-first preorder with an explicit parent
  array (``parent[0] == -1``); parents always precede children.
"""

from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import Dict

from ._rng import alias_draw, rng_new, rng_uniform

INT_INF = np.int64(1) << np.int64(60)


# ---------------------------------------------------------------------------
# maximum-weight rectangular assignment (shortest augmenting path, integers)
# ---------------------------------------------------------------------------

@njit(cache=True)
def assignment_max(w, nr, nc, row_of_col):
    """Maximum-weight assignment of ``min(nr, nc)`` pairs, exact in int64.

    ``w`` is a flat row-major (nr x nc) nonnegative weight matrix.  Writes
    the matched row of every column into ``row_of_col`` (-1 if free) and
    returns the total weight.  Weights >= 0 make a maximum full matching
    of the smaller side optimal among all partial matchings.
    """
    if nr == 0 or nc == 0:
        return np.int64(0)
    transposed = nr > nc
    if transposed:
        nr, nc = nc, nr
    # JV-style shortest augmenting path on cost = -w, columns 1..nc,
    # virtual column 0.
    u = np.zeros(nr + 1, dtype=np.int64)
    v = np.zeros(nc + 1, dtype=np.int64)
    p = np.zeros(nc + 1, dtype=np.int64)  # row (1-based) matched to column
    way = np.zeros(nc + 1, dtype=np.int64)
    minv = np.empty(nc + 1, dtype=np.int64)
    used = np.zeros(nc + 1, dtype=np.uint8)
    for i in range(1, nr + 1):
        p[0] = i
        j0 = np.int64(0)
        for j in range(nc + 1):
            minv[j] = INT_INF
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            delta = INT_INF
            j1 = np.int64(0)
            for j in range(1, nc + 1):
                if used[j] == 0:
                    if transposed:
                        cost = -w[(j - 1) * nr + (i0 - 1)]
                    else:
                        cost = -w[(i0 - 1) * nc + (j - 1)]
                    cur = cost - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(nc + 1):
                if used[j] == 1:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    total = np.int64(0)
    nc0 = nr if transposed else nc  # original column count
    for j in range(nc0):
        row_of_col[j] = -1
    for j in range(1, nc + 1):
        if p[j] > 0:
            if transposed:
                r = j - 1
                c = p[j] - 1
            else:
                r = p[j] - 1
                c = j - 1
            total += w[r * nc0 + c]
            row_of_col[c] = r
    return total


@njit(cache=True, inline="always")
def _match_value(w, nr, nc, scratch):
    """Matching value only; ``scratch`` must hold >= max(nr,nc)+1 int64."""
    if nr == 0 or nc == 0:
        return np.int64(0)
    if nr == 1:
        best = np.int64(0)
        for j in range(nc):
            if w[j] > best:
                best = w[j]
        return best
    if nc == 1:
        best = np.int64(0)
        for i in range(nr):
            if w[i] > best:
                best = w[i]
        return best
    return assignment_max(w, nr, nc, scratch)


# ---------------------------------------------------------------------------
# step-sequence (Lukasiewicz) utilities
# ---------------------------------------------------------------------------

@njit(cache=True)
def steps_to_parents(steps):
    """Preorder parent array from a valid Lukasiewicz step sequence.

    Returns an empty array if the sequence violates the path invariant
    (partial sums must stay >= 0 strictly before the end and finish at -1).
    """
    n = steps.shape[0]
    parent = np.full(n, -1, dtype=np.int64)
    bad = np.empty(0, dtype=np.int64)
    if n == 0:
        return bad
    # stack of (node, remaining children)
    stack_node = np.empty(n, dtype=np.int64)
    stack_rem = np.empty(n, dtype=np.int64)
    top = -1
    run = np.int64(0)
    for i in range(n):
        s = steps[i]
        if s < -1:
            return bad
        run += s
        if i < n - 1 and run < 0:
            return bad
        if i > 0:
            if top < 0:
                return bad
            parent[i] = stack_node[top]
            stack_rem[top] -= 1
            if stack_rem[top] == 0:
                top -= 1
        k = s + 1
        if k > 0:
            top += 1
            stack_node[top] = i
            stack_rem[top] = k
    if run != -1:
        return bad
    return parent


@njit(cache=True)
def subtree_sizes(parent):
    n = parent.shape[0]
    size = np.ones(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        size[parent[i]] += size[i]
    return size


@njit(cache=True)
def depths_from_parents(parent):
    n = parent.shape[0]
    depth = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        depth[i] = depth[parent[i]] + 1
    return depth


@njit(cache=True)
def subtree_heights(parent):
    n = parent.shape[0]
    h = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        p = parent[i]
        if h[i] + 1 > h[p]:
            h[p] = h[i] + 1
    return h


@njit(cache=True)
def children_csr(parent):
    """(cptr, cidx): children of node i are cidx[cptr[i]:cptr[i+1]].

    For preorder parents the children appear in plane (preorder) order.
    """
    n = parent.shape[0]
    cptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n):
        cptr[parent[i] + 1] += 1
    for i in range(n):
        cptr[i + 1] += cptr[i]
    fill = cptr.copy()
    cidx = np.empty(n - 1 if n > 0 else 0, dtype=np.int64)
    for i in range(1, n):
        p = parent[i]
        cidx[fill[p]] = i
        fill[p] += 1
    return cptr, cidx


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def bgw_walk_size(state, prob, alias, cap):
    """Total progeny of one Bienayme tree, capped: returns cap+1 if > cap."""
    alive = np.int64(1)
    count = np.int64(0)
    while alive > 0:
        count += 1
        if count > cap:
            return cap + np.int64(1)
        alive += alias_draw(state, prob, alias) - 1
    return count


@njit(cache=True)
def bgw_size_samples(k0, k1, task0, n, cap, prob, alias):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        state = rng_new(k0, k1, np.uint64(task0 + i))
        out[i] = bgw_walk_size(state, prob, alias, cap)
    return out


@njit(cache=True)
def bgw_steps(state, prob, alias, first_prob, first_alias, use_first, cap):
    """Lukasiewicz steps of one Bienayme tree (preorder offspring - 1).

    ``use_first`` overrides the root's law (root-biased trees).  Returns
    (steps, censored): when the node cap is hit, ``steps`` holds the
    first ``cap`` draws and censored is True.
    """
    buf = np.empty(64, dtype=np.int64)
    alive = np.int64(1)
    count = np.int64(0)
    while alive > 0:
        if count >= cap:
            return buf[:count], True
        if count >= buf.shape[0]:
            newbuf = np.empty(buf.shape[0] * 2, dtype=np.int64)
            newbuf[:count] = buf[:count]
            buf = newbuf
        if count == 0 and use_first:
            k = alias_draw(state, first_prob, first_alias)
        else:
            k = alias_draw(state, prob, alias)
        buf[count] = k - 1
        count += 1
        alive += k - 1
    return buf[:count], False


@njit(cache=True)
def bgw_level_tree(state, prob, alias, first_prob, first_alias, use_first,
                   level_cap, node_cap):
    """Breadth-first Bienayme tree truncated at depth ``level_cap``.

    Returns (kcount, depth, parent, status) with status 0 = complete
    (extinct before the cap), 1 = frontier alive at level_cap (their
    kcounts are left at 0), 2 = node cap hit (censored).

    ``use_first`` swaps in a different offspring law for the root, which
    yields root-biased trees when given the (k+1)mu(k+1) tables.
    """
    cap0 = 64
    kcount = np.zeros(cap0, dtype=np.int64)
    depth = np.zeros(cap0, dtype=np.int64)
    parent = np.full(cap0, -1, dtype=np.int64)
    n = np.int64(1)
    lev_lo = np.int64(0)
    lev_hi = np.int64(1)
    d = np.int64(0)
    status = np.int64(0)
    while lev_hi > lev_lo and d < level_cap:
        for i in range(lev_lo, lev_hi):
            if d == 0 and use_first:
                k = alias_draw(state, first_prob, first_alias)
            else:
                k = alias_draw(state, prob, alias)
            kcount[i] = k
            if n + k > node_cap:
                status = 2
                return kcount[:n], depth[:n], parent[:n], status
            while n + k > kcount.shape[0]:
                m = kcount.shape[0] * 2
                nk = np.zeros(m, dtype=np.int64)
                nk[:n] = kcount[:n]
                kcount = nk
                nd = np.zeros(m, dtype=np.int64)
                nd[:n] = depth[:n]
                depth = nd
                npar = np.full(m, -1, dtype=np.int64)
                npar[:n] = parent[:n]
                parent = npar
            for c in range(k):
                depth[n + c] = d + 1
                parent[n + c] = i
            n += k
        lev_lo = lev_hi
        lev_hi = n
        d += 1
    if lev_hi > lev_lo and d >= level_cap:
        status = 1
    return kcount[:n], depth[:n], parent[:n], status


@njit(cache=True)
def bfs_kid_start(kcount):
    n = kcount.shape[0]
    ks = np.empty(n, dtype=np.int64)
    acc = np.int64(1)
    for i in range(n):
        ks[i] = acc
        acc += kcount[i]
    return ks


@njit(cache=True)
def bfs_heights(kcount, kid_start):
    n = kcount.shape[0]
    h = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        best = np.int64(-1)
        for c in range(kid_start[i], kid_start[i] + kcount[i]):
            if h[c] > best:
                best = h[c]
        h[i] = best + 1
    return h


@njit(cache=True)
def height_min_sample(state, prob, alias, hcap):
    """min(Ht, hcap) of one Bienayme tree via the generation-size process."""
    alive = np.int64(1)
    h = np.int64(0)
    while h < hcap:
        total = np.int64(0)
        for _ in range(alive):
            total += alias_draw(state, prob, alias)
        if total == 0:
            return h
        alive = total
        h += 1
    return hcap


@njit(cache=True)
def height_samples(k0, k1, task0, n, hcap, prob, alias):
    out = np.empty(n, dtype=np.int32)
    for i in range(n):
        state = rng_new(k0, k1, np.uint64(task0 + i))
        out[i] = height_min_sample(state, prob, alias, hcap)
    return out


@njit(cache=True)
def conditioned_steps(state, n, prob, alias, max_attempts):
    """One size-n conditioned tree by rejection + Dwass rotation.

    Returns (steps, attempts); attempts == -1 flags a timeout.  The
    rotation starts just after the first global minimum of the partial
    sums, the unique rotation that is a valid Lukasiewicz path.
    """
    steps = np.empty(n, dtype=np.int64)
    for attempt in range(1, max_attempts + 1):
        total = np.int64(0)
        for i in range(n):
            k = alias_draw(state, prob, alias)
            steps[i] = k - 1
            total += k
        if total != n - 1:
            continue
        run = np.int64(0)
        best = INT_INF
        argmin = np.int64(0)
        for i in range(n):
            run += steps[i]
            if run < best:
                best = run
                argmin = i
        out = np.empty(n, dtype=np.int64)
        m = np.int64(0)
        for i in range(argmin + 1, n):
            out[m] = steps[i]
            m += 1
        for i in range(argmin + 1):
            out[m] = steps[i]
            m += 1
        return out, attempt
    return steps, np.int64(-1)


@njit(cache=True)
def conditioned_packed(k0, k1, task0, n, count, prob, alias, max_attempts):
    """Packed 4-bit keys of ``count`` conditioned trees (n <= 15).

    Key = sum over preorder positions i of (offspring_i << 4i).  Trees
    whose rejection budget runs out are skipped and counted (trees are
    independent, so skipping cannot bias the conditional law); returns
    (keys[:n_done], n_timeouts).
    """
    keys = np.empty(count, dtype=np.uint64)
    done = np.int64(0)
    timeouts = np.int64(0)
    for i in range(count):
        state = rng_new(k0, k1, np.uint64(task0 + i))
        steps, att = conditioned_steps(state, n, prob, alias, max_attempts)
        if att < 0:
            timeouts += 1
            continue
        key = np.uint64(0)
        for j in range(n):
            key |= np.uint64(steps[j] + 1) << np.uint64(4 * j)
        keys[done] = key
        done += 1
    return keys[:done], timeouts


@njit(cache=True)
def conditioned_max_outdeg(k0, k1, task0, n, count, prob, alias, max_attempts):
    """Max out-degree of ``count`` conditioned trees (no decode needed:
    rotation does not change the multiset of offspring values)."""
    out = np.full(count, -1, dtype=np.int64)
    for i in range(count):
        state = rng_new(k0, k1, np.uint64(task0 + i))
        for _ in range(max_attempts):
            total = np.int64(0)
            big = np.int64(0)
            for _ in range(n):
                k = alias_draw(state, prob, alias)
                total += k
                if k > big:
                    big = k
            if total == n - 1:
                out[i] = big
                break
    return out


@njit(cache=True)
def conditioned_acceptance(k0, k1, task, n, attempts, prob, alias):
    """Number of accepted rows among ``attempts`` i.i.d. attempts."""
    state = rng_new(k0, k1, np.uint64(task))
    hits = np.int64(0)
    for _ in range(attempts):
        total = np.int64(0)
        for _ in range(n):
            total += alias_draw(state, prob, alias)
        if total == n - 1:
            hits += 1
    return hits


# ---------------------------------------------------------------------------
# rooted LCS (clipped) on BFS arenas
# ---------------------------------------------------------------------------

@njit(cache=True)
def lcs_rooted_clipped(kcA, ksA, htA, kcB, ksB, htB, clip, budget):
    """min(LCS_rooted, clip) for two BFS arenas; -1 if budget exceeded.

    Prunes any node pair whose subtree heights both reach clip - 1, since
    a common path already certifies the clipped value there.  Values are
    exact as long as truncated arenas are only truncated below the
    shorter tree's height (the recursion never looks deeper).
    """
    if kcA[0] == 0 or kcB[0] == 0:
        return np.int64(1)
    nB = np.int64(kcB.shape[0])
    memo = Dict.empty(types.int64, types.int64)
    maxdeg = np.int64(1)
    for i in range(kcA.shape[0]):
        if kcA[i] > maxdeg:
            maxdeg = kcA[i]
    maxdegB = np.int64(1)
    for j in range(kcB.shape[0]):
        if kcB[j] > maxdegB:
            maxdegB = kcB[j]
    wbuf = np.empty(maxdeg * maxdegB, dtype=np.int64)
    scratch = np.empty(maxdeg + maxdegB + 2, dtype=np.int64)
    # explicit stack: (i, j, expanded)
    cap0 = 256
    st_i = np.empty(cap0, dtype=np.int64)
    st_j = np.empty(cap0, dtype=np.int64)
    st_x = np.empty(cap0, dtype=np.int64)
    top = np.int64(0)
    st_i[0] = 0
    st_j[0] = 0
    st_x[0] = 0
    work = np.int64(0)
    while top >= 0:
        i = st_i[top]
        j = st_j[top]
        expanded = st_x[top]
        top -= 1
        key = i * nB + j
        if key in memo:
            continue
        work += 1
        if work > budget:
            return np.int64(-1)
        a = htA[i]
        b = htB[j]
        m = a if a < b else b
        if m + 1 >= clip:
            memo[key] = clip
            continue
        ki = kcA[i]
        kj = kcB[j]
        if ki == 0 or kj == 0:
            memo[key] = 1
            continue
        if expanded == 0:
            # push self back, then all child pairs not yet memoized
            if top + 1 + ki * kj >= st_i.shape[0]:
                m2 = st_i.shape[0]
                while m2 <= top + 1 + ki * kj:
                    m2 *= 2
                t1 = np.empty(m2, dtype=np.int64)
                t1[:top + 1] = st_i[:top + 1]
                st_i = t1
                t2 = np.empty(m2, dtype=np.int64)
                t2[:top + 1] = st_j[:top + 1]
                st_j = t2
                t3 = np.empty(m2, dtype=np.int64)
                t3[:top + 1] = st_x[:top + 1]
                st_x = t3
            top += 1
            st_i[top] = i
            st_j[top] = j
            st_x[top] = 1
            for ci in range(ksA[i], ksA[i] + ki):
                for cj in range(ksB[j], ksB[j] + kj):
                    ck = ci * nB + cj
                    if ck not in memo:
                        top += 1
                        st_i[top] = ci
                        st_j[top] = cj
                        st_x[top] = 0
        else:
            # children ready: assemble weights and match
            idx = np.int64(0)
            for ci in range(ksA[i], ksA[i] + ki):
                for cj in range(ksB[j], ksB[j] + kj):
                    wbuf[idx] = memo[ci * nB + cj]
                    idx += 1
            val = 1 + _match_value(wbuf[:ki * kj], ki, kj, scratch)
            if val > clip:
                val = clip
            memo[key] = val
    return memo[np.int64(0)]


# ---------------------------------------------------------------------------
# unrooted LCS: oriented-edge dynamic program
# ---------------------------------------------------------------------------

@njit(cache=True)
def up_heights(parent, cptr, cidx, ht_down):
    """Height of the component rooted at parent(v) once edge {v,parent(v)}
    is removed, for every non-root v (entry 0 unused)."""
    n = parent.shape[0]
    hup = np.zeros(n, dtype=np.int64)
    # per-parent top-2 of (1 + ht_down[child])
    top1 = np.full(n, -1, dtype=np.int64)
    top2 = np.full(n, -1, dtype=np.int64)
    arg1 = np.full(n, -1, dtype=np.int64)
    for p in range(n):
        for t in range(cptr[p], cptr[p + 1]):
            c = cidx[t]
            v = 1 + ht_down[c]
            if v > top1[p]:
                top2[p] = top1[p]
                top1[p] = v
                arg1[p] = c
            elif v > top2[p]:
                top2[p] = v
    # preorder guarantees parents are processed before children
    for v in range(1, n):
        p = parent[v]
        best = np.int64(0)
        sib = top1[p] if arg1[p] != v else top2[p]
        if sib > best:
            best = sib
        if p != 0:
            t = 1 + hup[p]
            if t > best:
                best = t
        hup[v] = best
    return hup


@njit(cache=True)
def top3_arms(parent, cptr, cidx, ht_down, hup):
    """Per-vertex top-3 arm capacities (descending, 0-padded): the three
    largest values of 1 + height of a neighbor component."""
    n = parent.shape[0]
    arms = np.zeros((n, 3), dtype=np.int64)
    for v in range(n):
        a0 = np.int64(0)
        a1 = np.int64(0)
        a2 = np.int64(0)
        for t in range(cptr[v], cptr[v + 1]):
            c = cidx[t]
            x = 1 + ht_down[c]
            if x > a0:
                a2 = a1
                a1 = a0
                a0 = x
            elif x > a1:
                a2 = a1
                a1 = x
            elif x > a2:
                a2 = x
        if v != 0:
            x = 1 + hup[v]
            if x > a0:
                a2 = a1
                a1 = a0
                a0 = x
            elif x > a1:
                a2 = a1
                a1 = x
            elif x > a2:
                a2 = x
        arms[v, 0] = a0
        arms[v, 1] = a1
        arms[v, 2] = a2
    return arms


@njit(cache=True)
def lcs_unrooted_dp(parentA, cptrA, cidxA, parentB, cptrB, cidxB, budget):
    """Exact unrooted LCS via oriented-edge memoization.

    Oriented edge ids: v in 1..n-1 is the down edge (parent(v) -> v) whose
    component is the subtree at v; n + v is the up edge (v -> parent(v))
    whose component is everything else, rooted at parent(v).  The value of
    a pair of oriented edges is the rooted LCS of their components, and
    the unrooted LCS is the best root pairing over all vertex pairs.
    Returns -1 if the pair budget is exceeded.
    """
    nA = parentA.shape[0]
    nB = parentB.shape[0]
    if nA == 1 or nB == 1:
        return np.int64(1)
    htdA = subtree_heights(parentA)
    htdB = subtree_heights(parentB)
    hupA = up_heights(parentA, cptrA, cidxA, htdA)
    hupB = up_heights(parentB, cptrB, cidxB, htdB)
    if np.int64(2) * nA * nB > budget:
        return np.int64(-1)

    eA = 2 * nA
    eB = 2 * nB
    # heights per oriented edge id
    ehA = np.empty(eA, dtype=np.int64)
    ehB = np.empty(eB, dtype=np.int64)
    for v in range(nA):
        ehA[v] = htdA[v]
        ehA[nA + v] = hupA[v]
    for v in range(nB):
        ehB[v] = htdB[v]
        ehB[nB + v] = hupB[v]
    ordA = np.argsort(ehA[1:nA])  # down edges 1..nA-1
    ordB = np.argsort(ehB[1:nB])

    maxdegA = np.int64(1)
    for v in range(nA):
        d = cptrA[v + 1] - cptrA[v] + (1 if v != 0 else 0)
        if d > maxdegA:
            maxdegA = d
    maxdegB = np.int64(1)
    for v in range(nB):
        d = cptrB[v + 1] - cptrB[v] + (1 if v != 0 else 0)
        if d > maxdegB:
            maxdegB = d
    wbuf = np.empty(maxdegA * maxdegB, dtype=np.int64)
    scratch = np.empty(maxdegA + maxdegB + 2, dtype=np.int64)

    val = np.zeros((eA, eB), dtype=np.int32)

    # order all oriented edges of each tree by component height
    idsA = np.empty(eA - 2, dtype=np.int64)
    m = 0
    for v in range(1, nA):
        idsA[m] = v
        m += 1
        idsA[m] = nA + v
        m += 1
    keyA = np.empty(idsA.shape[0], dtype=np.int64)
    for t in range(idsA.shape[0]):
        keyA[t] = ehA[idsA[t]]
    idsA = idsA[np.argsort(keyA)]
    idsB = np.empty(eB - 2, dtype=np.int64)
    m = 0
    for v in range(1, nB):
        idsB[m] = v
        m += 1
        idsB[m] = nB + v
        m += 1
    keyB = np.empty(idsB.shape[0], dtype=np.int64)
    for t in range(idsB.shape[0]):
        keyB[t] = ehB[idsB[t]]
    idsB = idsB[np.argsort(keyB)]

    childA = np.empty(maxdegA, dtype=np.int64)
    childB = np.empty(maxdegB, dtype=np.int64)

    for ta in range(idsA.shape[0]):
        ea = idsA[ta]
        ka = _edge_children(ea, nA, parentA, cptrA, cidxA, childA)
        for tb in range(idsB.shape[0]):
            eb = idsB[tb]
            kb = _edge_children(eb, nB, parentB, cptrB, cidxB, childB)
            if ka == 0 or kb == 0:
                val[ea, eb] = 1
                continue
            idx = np.int64(0)
            for x in range(ka):
                for y in range(kb):
                    wbuf[idx] = val[childA[x], childB[y]]
                    idx += 1
            val[ea, eb] = 1 + _match_value(wbuf[:ka * kb], ka, kb, scratch)

    # root combination over vertex pairs
    best = np.int64(1)
    for va in range(nA):
        ka = np.int64(0)
        for t in range(cptrA[va], cptrA[va + 1]):
            childA[ka] = cidxA[t]
            ka += 1
        if va != 0:
            childA[ka] = nA + va
            ka += 1
        for vb in range(nB):
            kb = np.int64(0)
            for t in range(cptrB[vb], cptrB[vb + 1]):
                childB[kb] = cidxB[t]
                kb += 1
            if vb != 0:
                childB[kb] = nB + vb
                kb += 1
            if ka == 0 or kb == 0:
                cand = np.int64(1)
            else:
                idx = np.int64(0)
                for x in range(ka):
                    for y in range(kb):
                        wbuf[idx] = val[childA[x], childB[y]]
                        idx += 1
                cand = 1 + _match_value(wbuf[:ka * kb], ka, kb, scratch)
            if cand > best:
                best = cand
    return best


@njit(cache=True, inline="always")
def _edge_children(e, n, parent, cptr, cidx, out):
    """Child oriented edges of oriented edge ``e``; returns their count."""
    k = np.int64(0)
    if e < n:  # down edge at node e
        v = e
        for t in range(cptr[v], cptr[v + 1]):
            out[k] = cidx[t]
            k += 1
    else:  # up edge from v to its parent p: siblings down + p's up
        v = e - n
        p = parent[v]
        for t in range(cptr[p], cptr[p + 1]):
            c = cidx[t]
            if c != v:
                out[k] = c
                k += 1
        if p != 0:
            out[k] = n + p
            k += 1
    return k


# ---------------------------------------------------------------------------
# paired estimators
# ---------------------------------------------------------------------------

@njit(cache=True)
def lcs_pair_survey(k0, k1, task0, npairs, level_cap, clip,
                    probA, aliasA, firstA_p, firstA_a, useA,
                    probB, aliasB, firstB_p, firstB_a, useB,
                    node_cap, budget):
    """Clipped rooted-LCS values for independent tree pairs.

    Per pair returns min(LCS_rooted, clip) and a flag:
    0 exact, 1 clipped (value == clip certifies LCS >= clip),
    2 node-cap censored, 3 DP budget exhausted.
    Also returns min(Ht, level_cap) per pair for height statistics.
    """
    values = np.empty(npairs, dtype=np.int32)
    flags = np.zeros(npairs, dtype=np.int8)
    minht = np.empty(npairs, dtype=np.int32)
    for pid in range(npairs):
        stA = rng_new(k0, k1, np.uint64(task0 + 2 * pid))
        stB = rng_new(k0, k1, np.uint64(task0 + 2 * pid + 1))
        kcA, dA, pA, statusA = bgw_level_tree(
            stA, probA, aliasA, firstA_p, firstA_a, useA, level_cap, node_cap)
        kcB, dB, pB, statusB = bgw_level_tree(
            stB, probB, aliasB, firstB_p, firstB_a, useB, level_cap, node_cap)
        if statusA == 2 or statusB == 2:
            values[pid] = -1
            flags[pid] = 2
            minht[pid] = -1
            continue
        ksA = bfs_kid_start(kcA)
        ksB = bfs_kid_start(kcB)
        htA = bfs_heights(kcA, ksA)
        htB = bfs_heights(kcB, ksB)
        ha = htA[0]
        hb = htB[0]
        m = ha if ha < hb else hb
        minht[pid] = np.int32(m)
        if m >= level_cap or m + 1 >= clip:
            values[pid] = clip
            flags[pid] = 1
            continue
        v = lcs_rooted_clipped(kcA, ksA, htA, kcB, ksB, htB, clip, budget)
        if v < 0:
            values[pid] = -1
            flags[pid] = 3
        else:
            values[pid] = np.int32(v)
            flags[pid] = 1 if v >= clip else 0
    return values, flags, minht


@njit(cache=True)
def p_eps_survey(k0, k1, task0, npairs, eps, h_grid,
                 probA, aliasA, probB, aliasB, node_cap, budget):
    """Counts of the height-vs-LCS event per grid point h:
    { min(Ht, Ht') <= h  and  LCS_rooted > h^eps * (min + 1) }."""
    ng = h_grid.shape[0]
    hmax = np.int64(0)
    for t in range(ng):
        if np.int64(h_grid[t]) > hmax:
            hmax = np.int64(h_grid[t])
    level_cap = hmax + 1
    counts = np.zeros(ng, dtype=np.int64)
    n_censored = np.int64(0)
    dummy_p = np.empty(1, dtype=np.float64)
    dummy_a = np.empty(1, dtype=np.int64)
    for pid in range(npairs):
        stA = rng_new(k0, k1, np.uint64(task0 + 2 * pid))
        stB = rng_new(k0, k1, np.uint64(task0 + 2 * pid + 1))
        kcA, dA, pA, statusA = bgw_level_tree(
            stA, probA, aliasA, dummy_p, dummy_a, False, level_cap, node_cap)
        kcB, dB, pB, statusB = bgw_level_tree(
            stB, probB, aliasB, dummy_p, dummy_a, False, level_cap, node_cap)
        if statusA == 2 or statusB == 2:
            n_censored += 1
            continue
        ksA = bfs_kid_start(kcA)
        ksB = bfs_kid_start(kcB)
        htA = bfs_heights(kcA, ksA)
        htB = bfs_heights(kcB, ksB)
        m = htA[0] if htA[0] < htB[0] else htB[0]
        if m >= level_cap:
            continue  # min height above every grid point: event impossible
        small = kcA.shape[0] if kcA.shape[0] < kcB.shape[0] else kcB.shape[0]
        # threshold range the grid can ask about at this pair's m
        need = np.float64(0.0)
        low = np.float64(np.inf)
        for t in range(ng):
            if m <= h_grid[t]:
                thr = (h_grid[t] ** eps) * (m + 1)
                if thr > need:
                    need = thr
                if thr < low:
                    low = thr
        if need == 0.0:
            continue
        if np.float64(small) <= low:
            # LCS <= min size <= the smallest threshold: no h can fire
            continue
        clip = np.int64(need) + 2
        v = lcs_rooted_clipped(kcA, ksA, htA, kcB, ksB, htB, clip, budget)
        if v < 0:
            n_censored += 1
            continue
        for t in range(ng):
            if m <= h_grid[t] and np.float64(v) > (h_grid[t] ** eps) * (m + 1):
                counts[t] += 1
    return counts, n_censored


@njit(cache=True)
def m2o_lhs_survey(k0, k1, task0, nsamples, nmax, H, S, prob, alias,
                   node_cap):
    """Left side of the Many-to-One identity for n = 1..nmax and the four
    built-in (F, G) pairs, accumulated over ``nsamples`` Bienayme trees.

    Combos: 0 = (1,1), 1 = (1, ht^H), 2 = (cut^S, 1), 3 = (cut^S, ht^H).
    Exact despite depth-truncation: subtree heights are only needed up to
    H, and cut sizes only up to S (frontier subtrees are continued with
    capped total-progeny walks).
    """
    sums = np.zeros((nmax, 4), dtype=np.float64)
    level_cap = nmax + H
    dummy_p = np.empty(1, dtype=np.float64)
    dummy_a = np.empty(1, dtype=np.int64)
    n_censored = np.int64(0)
    for sid in range(nsamples):
        state = rng_new(k0, k1, np.uint64(task0 + sid))
        kc, depth, parent, status = bgw_level_tree(
            state, prob, alias, dummy_p, dummy_a, False, level_cap, node_cap)
        if status == 2:
            n_censored += 1
            continue
        nmat = kc.shape[0]
        ks = bfs_kid_start(kc)
        ht = bfs_heights(kc, ks)
        # frontier continuation sizes (strict descendants of depth-cap nodes)
        cont = np.zeros(nmat, dtype=np.int64)
        total_cont = np.int64(0)
        if status == 1:
            for i in range(nmat):
                if depth[i] == level_cap:
                    sz = bgw_walk_size(state, prob, alias, np.int64(S))
                    cont[i] = sz - 1
                    total_cont += sz - 1
        for n in range(1, nmax + 1):
            # per depth-n ancestor: materialized subtree size and frontier mass
            for u in range(nmat):
                if depth[u] != n:
                    continue
                # walk the subtree of u via the contiguous-BFS property?
                # children are contiguous per node but subtrees are not:
                # count by ancestor chase instead.
                theta_mat = np.int64(0)
                theta_cont = np.int64(0)
                for x in range(u, nmat):
                    if depth[x] < n:
                        continue
                    a = x
                    while depth[a] > n:
                        a = parent[a]
                    if a == u:
                        theta_mat += 1
                        theta_cont += cont[x]
                g = ht[u] if ht[u] < H else np.int64(H)
                cut = nmat - theta_mat + 1 + (total_cont - theta_cont)
                f = cut if cut < S else np.int64(S)
                sums[n - 1, 0] += 1.0
                sums[n - 1, 1] += g
                sums[n - 1, 2] += f
                sums[n - 1, 3] += f * g
    return sums, n_censored


@njit(cache=True)
def m2o_spine_f_survey(k0, k1, task0, nsamples, n, S,
                       kbias_prob, kbias_alias, prob, alias):
    """Spine-side F expectations: mean of 1 and of min(S, #Cut_{U_n}).

    The spine tree's cut at the level-n spine vertex is the spine path
    plus the complete off-spine bushes at levels 0..n-1, i.i.d. Bienayme
    trees whose totals are capped at S (exact under the outer min).
    """
    s_one = np.float64(0.0)
    s_cut = np.float64(0.0)
    for sid in range(nsamples):
        state = rng_new(k0, k1, np.uint64(task0 + sid))
        total = np.int64(n + 1)  # spine vertices, U_n included
        for _ in range(n):
            k = alias_draw(state, kbias_prob, kbias_alias)
            # one child continues the spine (uniform choice is irrelevant
            # for the cut size), k-1 bushes hang off
            for _ in range(k - 1):
                if total < S:
                    total += bgw_walk_size(state, prob, alias, np.int64(S))
        f = total if total < S else np.int64(S)
        s_one += 1.0
        s_cut += f
    return s_one / nsamples, s_cut / nsamples


@njit(cache=True)
def c_pair_values(k0, k1, task0, npairs, clip,
                  probA, aliasA, rootA_p, rootA_a,
                  probB, aliasB, rootB_p, rootB_a, node_cap, budget):
    """min(LCS_rooted, clip) for pairs of root-biased trees."""
    return lcs_pair_survey(k0, k1, task0, npairs, clip, clip,
                           probA, aliasA, rootA_p, rootA_a, True,
                           probB, aliasB, rootB_p, rootB_a, True,
                           node_cap, budget)


@njit(cache=True)
def bigjump_table_sums(k0, k1, task0, nsamples, m, cutoff, cdf):
    """S_m = sum of m i.i.d. capped table draws; cdf[i] = P(X <= i + 1)."""
    out = np.empty(nsamples, dtype=np.float64)
    kmax = cdf.shape[0]
    for sid in range(nsamples):
        state = rng_new(k0, k1, np.uint64(task0 + sid))
        total = np.float64(0.0)
        for _ in range(m):
            u = rng_uniform(state)
            lo = np.int64(0)
            hi = np.int64(kmax)
            while lo < hi:
                mid = (lo + hi) // 2
                if cdf[mid] < u:
                    lo = mid + 1
                else:
                    hi = mid
            x = np.float64(lo + 1)  # table draws beyond the end are capped
            if x > cutoff:
                x = cutoff
            total += x
        out[sid] = total
    return out


@njit(cache=True)
def bigjump_pareto_sums(k0, k1, task0, nsamples, m, alpha, cutoff):
    """Capped sums of symmetrized Pareto steps, P(|X| > x) = x^(-alpha)."""
    out = np.empty(nsamples, dtype=np.float64)
    for sid in range(nsamples):
        state = rng_new(k0, k1, np.uint64(task0 + sid))
        total = np.float64(0.0)
        for _ in range(m):
            u = rng_uniform(state)
            mag = (1.0 - u) ** (-1.0 / alpha)
            x = mag if rng_uniform(state) < 0.5 else -mag
            if x > cutoff:
                x = cutoff
            total += x
        out[sid] = total
    return out


@njit(cache=True)
def alias_draw_many(k0, k1, task, n, prob, alias):
    """n draws from one alias table on a single stream (test support)."""
    state = rng_new(k0, k1, np.uint64(task))
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = alias_draw(state, prob, alias)
    return out
