"""
Finding a top node by walking uphill
====================================

A crawler that only sees the h2-index of its current neighbours moves to the
best unvisited one until it is stuck, then jumps to a random unvisited
neighbour, up to a fixed number of restarts. The second variant breaks h2
ties by degree, which usually shortens the walk.
"""
import numpy as np

from h2index import CrawlConfig, compute_metrics, crawl, crawl_all, from_edges, top_nodes_connected

rng = np.random.default_rng(7)

# Preferential attachment with three links per new node.
targets = [0, 1, 2]
pool = []
edges = []
for new in range(3, 4000):
    edges += [(new, t) for t in targets]
    pool += targets + [new] * 3
    targets = list({pool[i] for i in rng.integers(len(pool), size=6)})[:3]
g = from_edges(np.array(edges))
m = compute_metrics(g)
print(f"{g.node_count} nodes; max h2 {m.max_h2} held by {np.sum(m.h2_index == m.max_h2)} nodes; "
      f"top nodes connected: {top_nodes_connected(g, m)}")

start = int(np.argmin(m.degree))
rec = crawl(g, m, start, CrawlConfig(max_index=m.max_h2, rng_seed=3))
print("\none crawl from node", start)
print("  h2 along the path:", [int(m.h2_index[v]) for v in rec.path])
print("  steps", rec.steps, "restarts", rec.restarts_used, "succeeded", rec.succeeded)

for variant in ("index", "index_degree"):
    summary, _ = crawl_all(g, m, CrawlConfig(repeat_limit=50, variant=variant, rng_seed=0))
    print(f"\n{variant}: {summary.runs} starts, avg steps {summary.avg_steps:.2f} "
          f"(std {summary.std_steps:.2f}), avg restarts {summary.avg_restarts:.2f}, "
          f"failed {summary.failed_pct:.2f}%")

# Without being told the global maximum the crawler spends its whole budget
# and reports the best node it saw.
blind = crawl(g, m, start, CrawlConfig(repeat_limit=5, rng_seed=3))
print(f"\nblind crawl: best h2 seen {m.h2_index[blind.best_node]} after {blind.steps} steps")

# Lazy evaluation computes h2 only for neighbours that could beat the current node.
lazy = crawl(g, None, start, CrawlConfig(max_index=m.max_h2, rng_seed=3, lazy=True))
print(f"lazy crawl: same path {lazy.path == rec.path}, h2 evaluations {lazy.h2_evaluations}")
