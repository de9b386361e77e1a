"""Percentile rank by h2-index and its four-parameter logistic model.

The model is ``a2 + (a1 - a2) / (1 + (x / x0)**p)``: ``a1`` is the level as
``x -> 0``, ``a2`` the level as ``x -> inf``, ``x0`` the midpoint and ``p`` the
hill slope. Once the parameters are known, a node's percentile rank follows
from its own h2-index in O(1).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import expit

from .evaluation import kendall_tau, pearson_r, spearman_rho

PARAM_NAMES = ("a1", "a2", "x0", "p")

# constants of the heuristic curve
HEURISTIC_A1 = 1.0
HEURISTIC_A2 = 100.0
HEURISTIC_P = 1.44


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class LogisticParams:
    a1: float
    a2: float
    x0: float
    p: float

    def __post_init__(self):
        if not self.x0 > 0:
            raise ValueError(f"x0 must be positive, got {self.x0}")

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.x0, self.p], dtype=np.float64)

    @classmethod
    def from_array(cls, arr) -> "LogisticParams":
        return cls(*(float(v) for v in arr))

    def to_dict(self) -> dict:
        return asdict(self)

    def __call__(self, h2):
        return logistic_eval(self, h2)


@dataclass(frozen=True)
class RankCurve:
    """One point per distinct positive h2-index value.

    ``n`` is the network size the percentiles were computed against;
    ``dropped_zero`` counts nodes with h2-index 0, which are not on the curve.
    """

    h2: np.ndarray
    percentile: np.ndarray
    n: int
    dropped_zero: int = 0

    def __len__(self):
        return len(self.h2)


@dataclass(frozen=True)
class FitReport:
    params: LogisticParams
    converged: bool
    iterations: int
    sse: float
    free: tuple = field(default=PARAM_NAMES)
    message: str = ""

    def to_dict(self) -> dict:
        return {**self.params.to_dict(), "converged": self.converged,
                "iterations": self.iterations, "sse": self.sse,
                "free": list(self.free), "message": self.message}


def percentile_ranks(h2) -> np.ndarray:
    """``(n - R(u) + 1) / n * 100`` for every node.

    ``R(u)`` is the competition rank by descending h2-index: one plus the
    number of nodes with a strictly larger value, so tied nodes share the
    best rank.
    """
    vals = np.asarray(h2)
    n = len(vals)
    if n == 0:
        return np.zeros(0)
    srt = np.sort(vals)
    larger = n - np.searchsorted(srt, vals, side="right")
    return (n - larger) / n * 100.0


def percentile_rank(metrics_or_h2, u: int) -> float:
    h2 = getattr(metrics_or_h2, "h2_index", metrics_or_h2)
    return float(percentile_ranks(h2)[u])


def rank_curve(metrics_or_h2) -> RankCurve:
    h2 = np.asarray(getattr(metrics_or_h2, "h2_index", metrics_or_h2))
    pct = percentile_ranks(h2)
    values, first = np.unique(h2, return_index=True)
    keep = values > 0
    return RankCurve(
        h2=values[keep].astype(np.float64),
        percentile=pct[first][keep],
        n=len(h2),
        dropped_zero=int(np.sum(h2 == 0)),
    )


def _power_term(x, x0, p):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(p * np.log(x[pos] / x0))
    if p <= 0:
        out[~pos] = np.inf if p < 0 else 1.0
    return out


def logistic_eval(params: LogisticParams, h2):
    """Model percentile at ``h2`` (scalar or array)."""
    if not params.x0 > 0:
        raise ValueError("x0 must be positive")
    scalar = np.ndim(h2) == 0
    x = np.atleast_1d(np.asarray(h2, dtype=np.float64))
    if np.any(x < 0):
        raise ValueError("h2 must be non-negative")
    t = _power_term(x, params.x0, params.p)
    with np.errstate(invalid="ignore"):
        y = np.where(np.isinf(t), params.a2, params.a2 + (params.a1 - params.a2) / (1.0 + t))
    return float(y[0]) if scalar else y


def _model_jac(theta, x):
    a1, a2, x0, p = theta
    lr = np.log(x / x0)
    # 1/(1+t) and t/(1+t) with t = (x/x0)^p, written to survive overflow of t
    s = expit(-p * lr)
    u = expit(p * lr)
    f = a2 + (a1 - a2) * s
    jac = np.empty((len(x), 4))
    jac[:, 0] = s
    jac[:, 1] = u
    common = (a1 - a2) * s * u
    jac[:, 2] = common * p / x0
    jac[:, 3] = -common * lr
    return f, jac


def levenberg_marquardt(
    x, y, theta0, free, *, max_iter: int = 1000, ftol: float = 1e-4,
    xtol: float = 1e-12, lam0: float = 1e-3,
):
    """Least-squares fit of the logistic model with Marquardt diagonal scaling.

    Only the parameters flagged in ``free`` move. Converges when both the
    actual and the predicted relative reduction of the squared residual drop
    below ``ftol``, when the relative step falls below ``xtol``, or when the
    residual vanishes. Returns ``(theta, converged, iterations, sse, history)``
    where ``history`` holds the sse after each accepted step.
    """
    theta = np.asarray(theta0, dtype=np.float64).copy()
    free = np.asarray(free, dtype=bool)
    f, jac = _model_jac(theta, x)
    r = y - f
    sse = float(r @ r)
    lam = lam0
    history = [sse]
    for it in range(1, max_iter + 1):
        if sse == 0.0:
            return theta, True, it - 1, sse, history
        J = jac[:, free]
        A = J.T @ J
        g = J.T @ r
        diag = np.diag(A).copy()
        diag[diag <= 0] = 1e-12
        accepted = False
        while not accepted:
            try:
                delta = np.linalg.solve(A + lam * np.diag(diag), g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                if lam > 1e20:
                    return theta, False, it, sse, history
                continue
            trial = theta.copy()
            trial[free] += delta
            if trial[2] > 0 and np.all(np.isfinite(trial)):
                f_t, jac_t = _model_jac(trial, x)
                r_t = y - f_t
                sse_t = float(r_t @ r_t)
            else:
                sse_t = np.inf
            if np.isfinite(sse_t) and sse_t <= sse:
                accepted = True
            else:
                lam *= 10.0
                if lam > 1e20:
                    # no descent direction left at working precision
                    return theta, True, it, sse, history
        lin = r - J @ delta
        pred = (sse - float(lin @ lin)) / sse
        actual = (sse - sse_t) / sse
        step = np.linalg.norm(delta) / (np.linalg.norm(theta[free]) + xtol)
        theta, jac, r, sse = trial, jac_t, r_t, sse_t
        history.append(sse)
        lam = max(lam / 10.0, 1e-15)
        if (actual <= ftol and pred <= ftol) or step <= xtol:
            return theta, True, it, sse, history
    return theta, False, max_iter, sse, history


def initial_guess(curve: RankCurve) -> LogisticParams:
    """Starting point read off the curve: its extremes and the h2 value nearest the mid-level."""
    y = curve.percentile
    a1, a2 = float(y.min()), float(y.max())
    if a1 == a2:
        a1 = 0.0
    mid = 0.5 * (a1 + a2)
    x0 = float(curve.h2[int(np.argmin(np.abs(y - mid)))])
    return LogisticParams(a1, a2, max(x0, 1e-6), HEURISTIC_P)


def fit_logistic(
    curve: RankCurve,
    init: LogisticParams | None = None,
    fixed=(),
    *,
    max_iter: int = 1000,
    tol: float = 1e-4,
) -> FitReport:
    """Fit the logistic model to a rank curve, weighting every curve point equally.

    ``fixed`` names parameters among ``a1``, ``a2``, ``p`` held at their
    ``init`` values; ``x0`` is always fitted. Hitting ``max_iter`` returns the
    best parameters found with ``converged=False``.
    """
    fixed = set(fixed)
    if not fixed <= {"a1", "a2", "p"}:
        raise FitError(f"only a1, a2 and p can be fixed, got {sorted(fixed)}")
    free = np.array([name not in fixed for name in PARAM_NAMES])
    if len(curve) < int(free.sum()):
        raise FitError(f"{len(curve)} curve points cannot determine {int(free.sum())} parameters")
    if np.any(curve.h2 <= 0):
        raise FitError("curve h2 values must be positive")
    if init is None:
        init = initial_guess(curve)
    theta, ok, iters, sse, _ = levenberg_marquardt(
        curve.h2, curve.percentile, init.as_array(), free, max_iter=max_iter, ftol=tol,
    )
    return FitReport(
        params=LogisticParams.from_array(theta), converged=ok, iterations=iters, sse=sse,
        free=tuple(n for n, f in zip(PARAM_NAMES, free) if f),
        message="" if ok else "iteration cap reached",
    )


def fit_best(curve: RankCurve, **kw) -> FitReport:
    """All four parameters free, started from a few slopes; keeps the lowest residual."""
    base = initial_guess(curve)
    best = None
    for p0 in (HEURISTIC_P, 0.5, 1.0, 2.0, 4.0):
        init = LogisticParams(base.a1, base.a2, base.x0, p0)
        rep = fit_logistic(curve, init, **kw)
        if best is None or rep.sse < best.sse:
            best = rep
    return best


def heuristic_params(curve: RankCurve, **kw) -> FitReport:
    """Fix ``a1 = 1``, ``a2 = 100``, ``p = 1.44`` and fit only the midpoint ``x0``."""
    base = initial_guess(curve)
    init = LogisticParams(HEURISTIC_A1, HEURISTIC_A2, base.x0, HEURISTIC_P)
    return fit_logistic(curve, init, fixed=("a1", "a2", "p"), **kw)


@dataclass(frozen=True)
class FitEvaluation:
    avg_abs_error: float
    std_dev: float
    kendall: float
    pearson: float
    spearman: float

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_fit(curve: RankCurve, params: LogisticParams) -> FitEvaluation:
    """Absolute error per curve point (mean and population std) and correlations
    between actual and model percentiles."""
    model = logistic_eval(params, curve.h2)
    err = np.abs(curve.percentile - model)
    return FitEvaluation(
        avg_abs_error=float(err.mean()),
        std_dev=float(err.std()),
        kendall=kendall_tau(curve.percentile, model),
        pearson=pearson_r(curve.percentile, model),
        spearman=spearman_rho(curve.percentile, model),
    )
