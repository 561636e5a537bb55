"""Random tree generation: plain, size-conditioned, root-biased, spine.

Every sampler is a pure function of (law, parameters, stream), so the
same seed always reproduces the same tree.
"""

from collections import Counter

import numpy as np

from treelcs import (Rng, make_standard_law, sample_bgw, sample_conditioned,
                     sample_root_biased, sample_spine, serialize)
from treelcs.samplers import conditional_tree_law, packed_key

g = make_standard_law("geometric_half")
b = make_standard_law("binary_half")
rng = Rng(2025)

print("== unconditioned Bienayme samples (same stream -> same tree) ==")
t = sample_bgw(g, rng.child("demo"))
print("sample:", serialize(t) if t.size < 30 else f"(size {t.size})")
print("reproducible:", sample_bgw(g, rng.child("demo")) == t)

print("\n== conditioned on exact size (rejection + cycle lemma) ==")
t = sample_conditioned(g, 12, rng.child("cond"))
print("a uniform 12-vertex plane tree:", serialize(t))

print("\nuniformity check: size-4 geometric trees are equiprobable")
exact = conditional_tree_law(g, 4)
counts = Counter(packed_key(sample_conditioned(g, 4, rng.child("u", i)))
                 for i in range(20000))
for key, p in exact.items():
    print(f"  shape {key:5d}: exact {p:.3f} empirical "
          f"{counts[key] / 20000:.3f}")

print("\n== root-biased trees: root degree law (k+1) mu(k+1) ==")
degs = np.array([sample_root_biased(g, rng.child("rb", i)).k(0)
                 for i in range(20000)])
print(f"E[root degree] = {degs.mean():.3f}  (sigma^2 = {g.variance:.3f})")
print("binary root-biased root degree is deterministically 1:",
      {sample_root_biased(b, rng.child('rbb', i)).k(0) for i in range(50)})

print("\n== spine (size-biased) trees: trims are i.i.d. root-biased ==")
sp = sample_spine(g, 3, rng.child("spine"))
print("spine vertex ids:", sp.spine)
print("trim sizes along the spine:", [t.size for t in sp.trims[1:]])
print("cut at the spine tip has size", sp.cut_at_tip().size,
      "of", sp.tree.size)
