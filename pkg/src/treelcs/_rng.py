"""Counter-based random streams (Philox4x64-10) and alias-method sampling.

All Monte-Carlo draws in the package come from Philox streams keyed by
(master_seed, stream path).  Streams with distinct keys are independent,
and a given key always reproduces the same stream, independent of how
work is chunked across workers.  The numba kernels use the njit
implementation below; pure-Python code uses numpy's Philox bit generator
with a separately derived key, so the two backends never overlap.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from numba import njit

# Philox4x64-10 round constants (same parametrization as numpy).
_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)

# Layout of the kernel RNG state vector (uint64[12]):
#   0,1   key
#   2     task word (counter c1; distinct tasks give disjoint streams)
#   3     block counter (c0)
#   4..7  output buffer
#   8     buffer index (0..4)
STATE_SIZE = 12


@njit(cache=True, inline="always")
def _mulhilo(a, b):
    a = np.uint64(a)
    b = np.uint64(b)
    lo = a * b
    # 128-bit high word via 32-bit split
    ahi = a >> np.uint64(32)
    alo = a & np.uint64(0xFFFFFFFF)
    bhi = b >> np.uint64(32)
    blo = b & np.uint64(0xFFFFFFFF)
    t = ahi * blo + ((alo * blo) >> np.uint64(32))
    hi = ahi * bhi + (t >> np.uint64(32))
    t2 = alo * bhi + (t & np.uint64(0xFFFFFFFF))
    hi += t2 >> np.uint64(32)
    return hi, lo


@njit(cache=True)
def philox4x64(c0, c1, c2, c3, k0, k1, out):
    """One Philox4x64-10 block; writes 4 uint64 words into ``out``."""
    x0, x1, x2, x3 = np.uint64(c0), np.uint64(c1), np.uint64(c2), np.uint64(c3)
    key0, key1 = np.uint64(k0), np.uint64(k1)
    for _ in range(10):
        hi0, lo0 = _mulhilo(_M0, x0)
        hi1, lo1 = _mulhilo(_M1, x2)
        y0 = hi1 ^ x1 ^ key0
        y1 = lo1
        y2 = hi0 ^ x3 ^ key1
        y3 = lo0
        x0, x1, x2, x3 = y0, y1, y2, y3
        key0 += _W0
        key1 += _W1
    out[0] = x0
    out[1] = x1
    out[2] = x2
    out[3] = x3


@njit(cache=True)
def rng_new(k0, k1, task):
    state = np.zeros(STATE_SIZE, dtype=np.uint64)
    state[0] = k0
    state[1] = k1
    state[2] = task
    state[3] = np.uint64(0)
    state[8] = np.uint64(4)  # force refill on first draw
    return state


@njit(cache=True, inline="always")
def rng_next_u64(state):
    idx = state[8]
    if idx >= np.uint64(4):
        philox4x64(state[3], state[2], np.uint64(0), np.uint64(0),
                   state[0], state[1], state[4:8])
        state[3] += np.uint64(1)
        idx = np.uint64(0)
    out = state[np.int64(4 + idx)]
    state[8] = idx + np.uint64(1)
    return out


@njit(cache=True, inline="always")
def rng_uniform(state):
    """Uniform double in [0, 1) with 53 random bits."""
    return np.float64(rng_next_u64(state) >> np.uint64(11)) * (2.0 ** -53)


@njit(cache=True, inline="always")
def rng_below(state, n):
    """Uniform integer in [0, n) (multiply-shift on the top 32 bits)."""
    x = rng_next_u64(state) >> np.uint64(32)
    return np.int64((x * np.uint64(n)) >> np.uint64(32))


@njit(cache=True, inline="always")
def alias_draw(state, prob, alias):
    """One draw from the discrete law encoded by Vose alias tables."""
    j = rng_below(state, prob.shape[0])
    if rng_uniform(state) < prob[j]:
        return j
    return np.int64(alias[j])


def build_alias(pmf):
    """Vose alias tables for a finite pmf (renormalized to sum 1)."""
    p = np.asarray(pmf, dtype=np.float64)
    n = p.size
    scaled = p * (n / p.sum())
    prob = np.empty(n, dtype=np.float64)
    alias = np.zeros(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    scaled = scaled.copy()
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = scaled[l] - (1.0 - scaled[s])
        if scaled[l] < 1.0:
            small.append(l)
        else:
            large.append(l)
    for i in large:
        prob[i] = 1.0
    for i in small:
        prob[i] = 1.0
    return prob, alias


def derive_key(master_seed, path):
    """Two uint64 key words from a master seed and a stream path.

    Collision-resistant (SHA-256 based), so callers can use readable,
    hierarchical stream ids without bookkeeping.
    """
    text = repr((int(master_seed),) + tuple(path)).encode()
    digest = hashlib.sha256(text).digest()
    k0 = int.from_bytes(digest[:8], "little")
    k1 = int.from_bytes(digest[8:16], "little")
    return np.uint64(k0), np.uint64(k1)


@dataclass(frozen=True)
class Rng:
    """A named random stream: (master_seed, stream_id path).

    ``kernel_key()`` feeds the njit Philox implementation, while
    ``generator()`` builds a numpy Generator on an independently derived
    key.  Both are pure functions of (master_seed, stream_id).
    """

    master_seed: int
    stream_id: tuple = field(default_factory=tuple)

    def child(self, *path) -> "Rng":
        return Rng(self.master_seed, self.stream_id + tuple(path))

    def kernel_key(self):
        return derive_key(self.master_seed, self.stream_id + ("nb",))

    def generator(self) -> np.random.Generator:
        k0, k1 = derive_key(self.master_seed, self.stream_id + ("np",))
        return np.random.Generator(np.random.Philox(key=[int(k0), int(k1)]))
