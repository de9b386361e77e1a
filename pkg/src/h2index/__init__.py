"""Local shell-index estimation with the h2-index.

Core entry points::

    from h2index import load_edge_list, compute_metrics
    g, report = load_edge_list("graph.txt")
    m = compute_metrics(g)
"""
from .coreness import (
    NodeMetrics,
    compute_metrics,
    h_iteration,
    h_of_list,
    h_sequence,
    shell_decomposition,
    verify_coreness_identity,
)
from .crawler import (
    CrawlConfig,
    CrawlRecord,
    crawl,
    crawl_all,
    crawl_index,
    crawl_index_degree,
    lazy_h2_frontier,
    top_nodes_connected,
)
from .evaluation import kendall_tau, monotonicity, pearson_r, spearman_rho, ranking_report
from .graph import (
    Graph,
    GraphError,
    LoadReport,
    from_edges,
    largest_connected_component,
    load_edge_list,
    write_edge_list,
)
from .rank import (
    LogisticParams,
    RankCurve,
    evaluate_fit,
    fit_best,
    fit_logistic,
    heuristic_params,
    logistic_eval,
    percentile_rank,
    percentile_ranks,
    rank_curve,
)
from .spreading import (
    SirConfig,
    SpreadingOutcome,
    epidemic_threshold,
    sir_single_run,
    spreading_power_all,
)

__version__ = "0.1.0"
