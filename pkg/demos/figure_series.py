"""
Data series for the two figures
===============================

Prints CSV, not images. Pass an edge-list path to use your own graph;
otherwise a synthetic co-authorship graph is used.

* ``correlation``: Kendall tau of shell index and of h2-index against SIR
  spreading power for infection probabilities 0.05 to 0.14.
* ``rank``: actual, best-fit and heuristic percentile rank per h2 value.

Usage: python figure_series.py [edges.txt] > series.csv
"""
import sys

import numpy as np

from h2index import (
    SirConfig,
    compute_metrics,
    fit_best,
    from_edges,
    heuristic_params,
    kendall_tau,
    largest_connected_component,
    load_edge_list,
    logistic_eval,
    rank_curve,
    spreading_power_all,
)

if len(sys.argv) > 1:
    g, _ = load_edge_list(sys.argv[1])
else:
    rng = np.random.default_rng(0)
    weight = np.ones(2000)
    edges = []
    for _ in range(1500):
        team = rng.choice(2000, size=int(rng.integers(1, 6)), replace=False, p=weight / weight.sum())
        weight[team] += 1
        edges += [(a, b) for i, a in enumerate(team) for b in team[i + 1:]]
    g = from_edges(np.array(edges), n=2000)
g = largest_connected_component(g)
m = compute_metrics(g)

print("series,x,ks,h2")
for lam in np.round(np.arange(0.05, 0.1401, 0.01), 2):
    sp = spreading_power_all(g, SirConfig(float(lam), runs_per_seed=100, rng_seed=0)).spreading_power
    print(f"correlation,{lam},{kendall_tau(m.shell_index, sp)!r},{kendall_tau(m.h2_index, sp)!r}")

curve = rank_curve(m)
best = fit_best(curve).params
heur = heuristic_params(curve).params
print("series,h2,actual,best_fit,heuristic")
for h, y in zip(curve.h2, curve.percentile):
    print(f"rank,{int(h)},{float(y)!r},{logistic_eval(best, h)!r},{logistic_eval(heur, h)!r}")
