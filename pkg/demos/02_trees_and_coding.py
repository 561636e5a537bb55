"""Plane trees: arena layout, Lukasiewicz coding, structural operators."""

import numpy as np

from treelcs import (LukasiewiczPath, cut_at, decode_lukasiewicz,
                     encode_lukasiewicz, neighbor_component_depths, parse,
                     reroot, serialize, subtree_at, trim_at)

t = parse("(()(()())(()))")
print("tree:", serialize(t))
print("size", t.size, "height", t.height, "max out-degree",
      t.max_outdegree)
print("preorder out-degrees:", [t.k(u) for u in range(t.size)])

path = encode_lukasiewicz(t)
print("Lukasiewicz steps:", list(path.steps))
print("decode(encode(t)) == t:", decode_lukasiewicz(path) == t)

print("\n== the three pruning operators at u = 2 ==")
print("subtree_at (theta_u):", serialize(subtree_at(t, 2)))
print("cut_at     (Cut_u):  ", serialize(cut_at(t, 2)))
print("trim_at    (Trim_u): ", serialize(trim_at(t, 2)))
print("size identity #theta + #Cut == #t + 1:",
      subtree_at(t, 2).size + cut_at(t, 2).size == t.size + 1)

print("\n== rerooting (the unrooted graph is unchanged) ==")
for v in (0, 2, 5):
    print(f"rerooted at {v}:", serialize(reroot(t, v)))

print("\n== arm capacities (neighbor component depths) ==")
for v in range(t.size):
    print(f"v={v}: {neighbor_component_depths(t, v)}")

print("\none-liner round trip:",
      serialize(decode_lukasiewicz(
          LukasiewiczPath(np.array([2, 0, -1, -1, -1])))))
