"""Largest common subtrees: the exact dynamic programs and their oracles.

The rooted DP pairs child subtrees through a maximum-weight matching;
the unrooted value memoizes oriented edges so all rootings share work;
the Y-shape (tripod) value reduces to Pareto frontiers of arm triples.
"""

import numpy as np

from treelcs import (Rng, lcs3_length, lcs_rooted, lcs_rooted_bruteforce,
                     lcs_unrooted, lcs_unrooted_bruteforce, lcsN_bruteforce,
                     make_standard_law, max_weight_matching, parse,
                     sample_conditioned, serialize, span_length,
                     tripod_frontier)

a = parse("(()(()))")
b = parse("((())(()))")
print("t  =", serialize(a))
print("t' =", serialize(b))
print("rooted LCS:", lcs_rooted(a, b),
      " brute force:", lcs_rooted_bruteforce(a, b))
print("unrooted LCS:", lcs_unrooted(a, b),
      " brute force:", lcs_unrooted_bruteforce(a, b))

print("\nthe inner solver: max-weight child matching")
print("value, pairs =", max_weight_matching([[3, 1], [1, 3]]))

print("\n== tripods (largest common Y-shape) ==")
star = parse("(()()())")
path = parse("((((((()))))))")
print("frontier of K_{1,3}:", tripod_frontier(star).triples.tolist())
print("frontier of a 6-path:", tripod_frontier(path).triples.tolist())
print("lcs3(K13, 6-path) =", lcs3_length(star, path))
print("agrees with the bounded-leaf oracle:",
      lcs3_length(star, path) == lcsN_bruteforce(star, path, 3))
print("span of the star's three leaves:", span_length(star, [1, 2, 3]))

print("\n== scaling with size (uniform plane trees) ==")
g = make_standard_law("geometric_half")
rng = Rng(7)
for n in (64, 256):
    vals = []
    for i in range(30):
        ta = sample_conditioned(g, n, rng.child("a", n, i))
        tb = sample_conditioned(g, n, rng.child("b", n, i))
        vals.append(lcs_unrooted(ta, tb) / np.sqrt(n))
    print(f"n={n:4d}: mean LCS/sqrt(n) = {np.mean(vals):.2f}")
