"""Ranking quality scores: monotonicity and correlation with spreading power."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats


class UndefinedCorrelationError(ValueError):
    pass


@dataclass(frozen=True)
class RankingEvaluation:
    monotonicity: float
    kendall_tau: float
    pearson_r: float
    spearman_rho: float

    def to_dict(self) -> dict:
        return asdict(self)


def monotonicity(values) -> float:
    """``(1 - sum_r n_r (n_r - 1) / (n (n - 1)))**2`` over tie groups of ``values``.

    0 when every value is equal, 1 when all are distinct. A single value counts
    as a ranking with no ties.
    """
    vals = np.asarray(values).ravel()
    n = len(vals)
    if n == 0:
        raise ValueError("monotonicity of an empty ranking")
    if n == 1:
        return 1.0
    _, counts = np.unique(vals, return_counts=True)
    counts = counts.astype(np.float64)
    tied = float(np.sum(counts * (counts - 1)))
    return (1.0 - tied / (n * (n - 1.0))) ** 2


def _pair(x, y):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelationError("undefined correlation: zero variance input")
    return x, y


def pearson_r(x, y) -> float:
    x, y = _pair(x, y)
    dx = x - math.fsum(x) / len(x)
    dy = y - math.fsum(y) / len(y)
    r = math.fsum(dx * dy) / math.sqrt(math.fsum(dx * dx) * math.fsum(dy * dy))
    return float(min(1.0, max(-1.0, r)))


def midrank(x) -> np.ndarray:
    """Ranks starting at 1 with tied entries sharing their average rank."""
    return stats.rankdata(np.asarray(x, dtype=np.float64), method="average")


def spearman_rho(x, y) -> float:
    x, y = _pair(x, y)
    return pearson_r(midrank(x), midrank(y))


def kendall_tau(x, y) -> float:
    """Tie-adjusted Kendall tau-b."""
    x, y = _pair(x, y)
    tau = stats.kendalltau(x, y, variant="b").statistic
    return float(tau)


def evaluate_ranking(scores, spreading_power) -> RankingEvaluation:
    return RankingEvaluation(
        monotonicity=monotonicity(scores),
        kendall_tau=kendall_tau(scores, spreading_power),
        pearson_r=pearson_r(scores, spreading_power),
        spearman_rho=spearman_rho(scores, spreading_power),
    )


def ranking_report(shell_index, h2_index, spreading_power) -> dict:
    """Monotonicity of both indices and their three correlations with spreading power."""
    ks = evaluate_ranking(shell_index, spreading_power)
    h2 = evaluate_ranking(h2_index, spreading_power)
    return {
        "nodes": int(len(np.asarray(shell_index))),
        "monotonicity_ks": ks.monotonicity,
        "monotonicity_h2": h2.monotonicity,
        "ks_kendall": ks.kendall_tau,
        "ks_pearson": ks.pearson_r,
        "ks_spearman": ks.spearman_rho,
        "h2_kendall": h2.kendall_tau,
        "h2_pearson": h2.pearson_r,
        "h2_spearman": h2.spearman_rho,
    }
