"""Offspring laws: the critical families and their exact analysis.

Builds the named critical laws, shows their moments, and checks the
exact tree-size law (Kemperman convolution) against the closed forms.
"""

import numpy as np

from treelcs import exact_size_law, make_logtail_law, make_standard_law, \
    moments
from treelcs.offspring import height_survival, size_probabilities

print("== the critical zoo ==")
for name in ("binary_half", "geometric_half", "poisson_one"):
    law = make_standard_law(name)
    mean, var, ms, bound = moments(law)
    print(f"{name:15s} mean={mean:.12f} sigma^2={var:.6f} "
          f"gcd={law.support_gcd} support<= {law.tail_truncation}")

law = make_standard_law("d_ary", d=3)
print(f"{'d_ary(3)':15s} mean={law.mean:.12f} sigma^2={law.variance:.6f} "
      f"gcd={law.support_gcd}")

print("\n== heavy-tail family: mu(k) ~ w k^-3 (ln k)^-lambda ==")
lt = make_logtail_law(1.5)
print(f"logtail(1.5): mean={lt.mean:.12f} sigma^2={lt.variance:.4f} "
      f"pmf[0]={lt.pmf[0]:.4f} pmf[1]={lt.pmf[1]:.4f} "
      f"support<= {lt.tail_truncation}")
mean, var, ms, _ = moments(lt)
print("p-th moments (None = diverges):", ms)

print("\n== exact size law: P(#tree = n) ==")
g = make_standard_law("geometric_half")
b = make_standard_law("binary_half")
q = exact_size_law(g, 8)
print("geometric (uniform plane trees):",
      np.array2string(q[1:], precision=5))
print("binary (odd sizes only):       ",
      np.array2string(exact_size_law(b, 8)[1:], precision=5))
closed = size_probabilities(g, 8)
print("closed form (Catalan) agrees to",
      float(np.abs(closed[1:9] - q[1:9]).max()))

print("\n== exact height law: P(Ht >= h) by generating-function "
      "iteration ==")
s = height_survival(g, 50)
print("geometric: P(Ht >= h) = 1/(h+1) exactly ->",
      [round(float(s[h]) * (h + 1), 10) for h in (1, 5, 20, 50)])
sb = height_survival(b, 50)
print("binary: h * P(Ht >= h) climbs toward 2/sigma^2 = 2:",
      [round(h * float(sb[h]), 4) for h in (5, 10, 25, 50)])
