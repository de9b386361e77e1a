"""
Estimating a node's rank from its h2-index alone
================================================

Plotting percentile rank against h2-index gives an S-shaped curve that a
four-parameter logistic fits well. Once the parameters are known, a node's
rank follows from its own h2-index. A heuristic that fixes three parameters
(a1 = 1, a2 = 100, p = 1.44) and fits only the midpoint x0 does nearly as
well on many graphs.
"""
import numpy as np

from h2index import compute_metrics, evaluate_fit, fit_best, from_edges, heuristic_params, rank_curve
from h2index.rank import logistic_eval

rng = np.random.default_rng(5)
# Co-authorship-like graph with teams of up to eight authors, so h2 spans a
# useful range of values.
n = 5000
weight = np.ones(n)
edges = []
for _ in range(5000):
    team = rng.choice(n, size=int(rng.integers(1, 9)), replace=False, p=weight / weight.sum())
    weight[team] += 1
    edges += [(a, b) for i, a in enumerate(team) for b in team[i + 1:]]
g = from_edges(np.array(edges), n=n)

curve = rank_curve(compute_metrics(g))
print(f"{len(curve)} distinct positive h2 values over {curve.n} nodes ({curve.dropped_zero} with h2 = 0 left out)")

best = fit_best(curve)
heur = heuristic_params(curve)
for name, rep in (("best fit", best), ("heuristic", heur)):
    ev = evaluate_fit(curve, rep.params)
    p = rep.params
    print(f"\n{name}: a1={p.a1:.2f} a2={p.a2:.2f} x0={p.x0:.2f} p={p.p:.2f} "
          f"({rep.iterations} iterations, converged {rep.converged})")
    print(f"  mean abs error {ev.avg_abs_error:.2f} (std {ev.std_dev:.2f}); "
          f"kendall {ev.kendall:.2f} pearson {ev.pearson:.2f} spearman {ev.spearman:.2f}")

print("\n h2  actual  best-fit  heuristic")
for h, y in list(zip(curve.h2, curve.percentile))[:: max(1, len(curve) // 12)]:
    print(f"{int(h):3d}  {y:6.2f}  {logistic_eval(best.params, h):8.2f}  {logistic_eval(heur.params, h):9.2f}")
