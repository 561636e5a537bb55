"""The square-root scaling law at desk scale.

For two independent size-n uniform plane trees, the unrooted LCS is of
order sqrt(n) and the ratio LCS / LCS3 drifts toward the constant
c = E[rooted LCS of a root-biased pair] as n grows.  This script shows
the drift and the KS distance between n^{-1/2} LCS and c_hat n^{-1/2}
LCS3 shrinking with n (slowly: the constant is an n -> infinity object).
"""

import numpy as np

from treelcs import (EmpiricalDistribution, Rng, estimate_c, ks_distance,
                     lcs3_length, lcs_unrooted, make_standard_law,
                     sample_conditioned)

g = make_standard_law("geometric_half")
rng = Rng(515)

c_hat = estimate_c(g, g, 20000, rng.child("c"))
print(f"c_hat = {c_hat.point:.3f}  "
      f"(MoM CI [{c_hat.ci_low:.3f}, {c_hat.ci_high:.3f}], "
      f"{c_hat.n_censored} clipped)")

print(f"\n{'n':>6} {'E[LCS]/sqrt(n)':>15} {'E[LCS3]/sqrt(n)':>16} "
      f"{'ratio':>7} {'KS':>6}")
for n, reps in ((64, 300), (256, 150), (1024, 40)):
    lcs_v, y3_v = [], []
    for i in range(reps):
        ta = sample_conditioned(g, n, rng.child("a", n, i))
        tb = sample_conditioned(g, n, rng.child("b", n, i))
        lcs_v.append(lcs_unrooted(ta, tb))
        y3_v.append(lcs3_length(ta, tb))
    lcs_v = np.array(lcs_v, dtype=float)
    y3_v = np.array(y3_v)
    ks = ks_distance(EmpiricalDistribution(lcs_v / np.sqrt(n)),
                     EmpiricalDistribution(c_hat.point * y3_v / np.sqrt(n)))
    print(f"{n:6d} {lcs_v.mean() / np.sqrt(n):15.3f} "
          f"{y3_v.mean() / np.sqrt(n):16.3f} "
          f"{lcs_v.mean() / y3_v.mean():7.3f} {ks:6.3f}")

print("\nThe ratio column climbs toward c_hat, but at desk sizes the "
      "constant has not\nconverged: the two scaled laws still barely "
      "overlap (KS near 1 at these sizes).")
