"""
From degree to coreness through repeated h-indices
==================================================

The h-index of a list is the largest h such that h entries are at least h.
Applied to a node's neighbour degrees it gives the node's h-index; applied
again to the neighbours' h-indices it gives the h2-index. Repeating the step
converges to the shell index, and each step is cheaper than a full k-shell
decomposition because it only looks one hop away.
"""
import numpy as np

from h2index import compute_metrics, from_edges, h_of_list, h_sequence, verify_coreness_identity

print("h of [1, 2, 3, 3, 4, 6, 8, 10] =", h_of_list([1, 2, 3, 3, 4, 6, 8, 10]))
print("h of [10, 11, 11, 13, 15, 25] =", h_of_list([10, 11, 11, 13, 15, 25]))

# A small graph: a 5-clique, a 4-cycle hanging off it and a tail.
edges = [(a, b) for a in range(5) for b in range(a + 1, 5)]
edges += [(4, 5), (5, 6), (6, 7), (7, 4), (7, 8), (8, 9)]
g = from_edges(np.array(edges))
m = compute_metrics(g)

print("\nnode  degree  h  h2  shell")
for u in range(g.node_count):
    print(f"{u:4d}  {m.degree[u]:6d}  {m.h_index[u]:1d}  {m.h2_index[u]:2d}  {m.shell_index[u]:5d}")

# Each row of the sequence applies the neighbour-h operator once more.
seq = h_sequence(g)
print(f"\niterations from degree to the fixed point: {len(seq) - 1}")
for i, vec in enumerate(seq):
    print(f"  h^{i}:", vec.tolist())
print("fixed point equals shell index:", np.array_equal(seq[-1], m.shell_index))

ok, bad = verify_coreness_identity(g, m)
print("shell index is the h-index of neighbour shell indices everywhere:", ok)
