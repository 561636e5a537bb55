"""Why finite variance alone is not enough: the heavy-tail family.

Under mu(k) ~ w k^-3 (ln k)^-lambda (1 < lambda < 2) the variance is
finite but every 2+kappa moment diverges.  Size-n trees then contain a
vertex of out-degree ~ sqrt(n / ln^lambda n); gluing the two big stars
along their height-sorted subtrees certifies a common subtree of size
Delta log Delta >> sqrt(n), beating the square-root law.
"""

import math

import numpy as np

from treelcs import Rng, make_logtail_law, make_standard_law, \
    star_lower_bound
from treelcs._kernels import conditioned_max_outdeg
from treelcs.samplers import rejection_budget

rng = Rng(909)

print("== the star lower bound: sum_h min(N_h, N'_h) ==")
g = make_standard_law("geometric_half")
for delta in (100, 1000, 10000):
    res = star_lower_bound(g, delta, 50, rng.child("star", delta))
    print(f"Delta={delta:6d}: mean bound {res.point:10.1f}   "
          f"Delta*ln(Delta)/4 = {delta * math.log(delta) / 4:10.1f}")

print("\n== big vertices in conditioned heavy-tail trees ==")
lt = make_logtail_law(1.5)
n = 20000
threshold = 0.1 * math.sqrt(n / math.log(n) ** 1.5)
k0, k1 = rng.child("deg").kernel_key()
prob, alias = lt.sampler_table()
degs = conditioned_max_outdeg(k0, k1, np.uint64(0), np.int64(n),
                              np.int64(20), prob, alias,
                              np.int64(rejection_budget(lt, n)))
print(f"n = {n}: max out-degrees of 20 conditioned trees: "
      f"{sorted(int(d) for d in degs)}")
print(f"threshold 0.1 sqrt(n/ln^1.5 n) = {threshold:.1f}; fraction above: "
      f"{float(np.mean(degs >= threshold)):.2f}")
print("\nEach such vertex roots ~Delta i.i.d. subtrees in both trees, so "
      "the star bound\napplies inside the conditioned trees and yields "
      "LCS >> sqrt(n) with high probability.")
