"""
How well does the h2-index predict spreading power?
===================================================

Every node seeds an SIR process in turn. With recovery after one step, the
number of nodes ever infected is that seed's spreading power, averaged over
many runs. Rankings by shell index and by h2-index are then scored on how
many ties they leave (monotonicity) and on how well they agree with the
simulated spreading power.
"""
import numpy as np

from h2index import (
    SirConfig,
    compute_metrics,
    epidemic_threshold,
    from_edges,
    largest_connected_component,
    spreading_power_all,
    ranking_report,
)

rng = np.random.default_rng(1)

# Co-authorship-like graph: each paper joins its authors into a clique.
n_authors = 3000
weight = np.ones(n_authors)
edges = []
for _ in range(2000):
    k = int(rng.integers(1, 6))
    team = rng.choice(n_authors, size=k, replace=False, p=weight / weight.sum())
    weight[team] += 1
    edges += [(a, b) for i, a in enumerate(team) for b in team[i + 1:]]
g = largest_connected_component(from_edges(np.array(edges), n=n_authors))
print(f"largest component: {g.node_count} nodes, {g.edge_count} edges")

lam_c = epidemic_threshold(g)
print(f"epidemic threshold {lam_c:.4f}; simulating at {lam_c + 0.01:.4f}")

m = compute_metrics(g)
out = spreading_power_all(g, SirConfig(lam_c + 0.01, runs_per_seed=100, rng_seed=0))
row = ranking_report(m.shell_index, m.h2_index, out.spreading_power)
for key, value in row.items():
    print(f"  {key:16s} {value:.3f}" if isinstance(value, float) else f"  {key:16s} {value}")

# The h2-index never ranks below the shell index and rarely differs from it.
diff = m.h2_index - m.shell_index
print(f"\nh2 equals shell index at {np.mean(diff == 0):.1%} of nodes; max overshoot {diff.max()}")
