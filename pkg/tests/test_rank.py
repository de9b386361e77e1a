import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import least_squares, minimize_scalar

from h2index.evaluation import UndefinedCorrelationError
from h2index.rank import (
    FitError,
    LogisticParams,
    RankCurve,
    evaluate_fit,
    fit_best,
    fit_logistic,
    heuristic_params,
    levenberg_marquardt,
    logistic_eval,
    percentile_rank,
    percentile_ranks,
    rank_curve,
)

X = np.arange(1, 61, dtype=float)


def synthetic(params, x=X):
    return RankCurve(x, logistic_eval(params, x), n=1000)


def brute_percentiles(vals):
    n = len(vals)
    return [(n - (1 + sum(1 for w in vals if w > v)) + 1) / n * 100 for v in vals]


def test_percentiles_example():
    assert percentile_ranks([5, 3, 3, 1]).tolist() == [100, 75, 75, 25]
    assert percentile_rank(np.array([5, 3, 3, 1]), 3) == 25


@given(st.lists(st.integers(0, 30), min_size=1, max_size=80))
def test_percentiles_match_brute_force(vals):
    pct = percentile_ranks(vals)
    assert pct.tolist() == pytest.approx(brute_percentiles(vals))
    assert np.all(pct > 0) and np.all(pct <= 100)
    assert set(np.flatnonzero(pct == 100)) == set(np.flatnonzero(np.array(vals) == max(vals)))


def test_unique_extremes():
    vals = [9, 4, 4, 2, 1]
    pct = percentile_ranks(vals)
    assert pct[0] == 100 and pct[-1] == pytest.approx(100 / 5)


def test_rank_curve():
    c = rank_curve(np.array([5, 3, 3, 1]))
    assert c.h2.tolist() == [1, 3, 5] and c.percentile.tolist() == [25, 75, 100]
    c = rank_curve(np.array([4, 4, 4]))
    assert c.h2.tolist() == [4] and c.percentile.tolist() == [100]
    c = rank_curve(np.array([0, 2, 1, 0]))
    assert c.h2.tolist() == [1, 2] and c.dropped_zero == 2 and c.n == 4


@given(st.lists(st.integers(1, 40), min_size=2, max_size=100))
def test_curve_strictly_increasing_to_100(vals):
    c = rank_curve(np.array(vals))
    assert np.all(np.diff(c.percentile) > 0)
    assert c.percentile[-1] == 100


def test_logistic_eval_points():
    p = LogisticParams(1, 100, 10, 1.44)
    assert logistic_eval(p, 10) == pytest.approx(50.5)
    assert logistic_eval(p, 0) == 1
    assert logistic_eval(p, 1e12) == pytest.approx(100, abs=1e-6)
    q = LogisticParams(3, 80, 2.5, 0.7)
    assert logistic_eval(q, 2.5) == pytest.approx(41.5)
    assert np.allclose(logistic_eval(q, np.array([1.0, 2.0])), 80 + (3 - 80) / (1 + (np.array([1.0, 2.0]) / 2.5) ** 0.7))


def test_invalid_x0():
    with pytest.raises(ValueError):
        LogisticParams(1, 100, 0, 1)
    with pytest.raises(ValueError):
        logistic_eval(LogisticParams(1, 100, 1, 1), -1)


@settings(max_examples=50)
@given(st.floats(-50, 50), st.floats(0.1, 100), st.floats(0.1, 50), st.floats(0.1, 6))
def test_strictly_increasing(a1, gap, x0, p):
    params = LogisticParams(a1, a1 + gap, x0, p)
    grid = np.linspace(0.05, 4 * x0, 200)
    y = logistic_eval(params, grid)
    assert np.all(np.diff(y) >= 0)
    coarse = logistic_eval(params, np.array([0.5 * x0, x0, 2 * x0]))
    assert np.all(np.diff(coarse) > 0)


@pytest.mark.parametrize("true", [(1, 100, 7, 1.5), (5, 98, 3.2, 2.4), (0.2, 100, 15, 0.9)])
def test_noiseless_recovery(true):
    t = LogisticParams(*true)
    rep = fit_best(synthetic(t))
    assert rep.converged
    np.testing.assert_allclose(rep.params.as_array(), t.as_array(), rtol=1e-6)


def test_noisy_recovery_on_average():
    t = LogisticParams(1, 100, 7, 1.5)
    base = logistic_eval(t, X)
    rng = np.random.default_rng(0)
    est = np.array([
        fit_best(RankCurve(X, base + rng.normal(0, 1, len(X)), 1000)).params.as_array()
        for _ in range(100)
    ])
    rel = np.abs(est.mean(axis=0) / t.as_array() - 1)
    assert np.all(rel < 0.05), rel


def test_matches_scipy_lm():
    rng = np.random.default_rng(4)
    t = LogisticParams(2, 97, 5, 1.8)
    y = logistic_eval(t, X) + rng.normal(0, 2, len(X))
    curve = RankCurve(X, y, 500)
    rep = fit_best(curve)

    def resid(th):
        return y - (th[1] + (th[0] - th[1]) / (1 + (X / th[2]) ** th[3]))

    ref = least_squares(resid, rep.params.as_array() * 1.05, method="lm", xtol=1e-14, ftol=1e-14)
    assert rep.sse == pytest.approx(float(ref.fun @ ref.fun), rel=1e-3)
    np.testing.assert_allclose(rep.params.as_array(), ref.x, rtol=1e-2)


def test_heuristic_self_consistency():
    t = LogisticParams(1, 100, 9.3, 1.44)
    rep = heuristic_params(synthetic(t))
    assert rep.free == ("x0",)
    assert rep.params.x0 == pytest.approx(9.3, rel=1e-6)
    assert (rep.params.a1, rep.params.a2, rep.params.p) == (1, 100, 1.44)


@pytest.mark.parametrize("seed", range(5))
def test_x0_only_fit_matches_golden_section(seed):
    rng = np.random.default_rng(seed)
    x = np.arange(1, 16, dtype=float)
    y = np.sort(rng.uniform(0, 100, len(x)))
    curve = RankCurve(x, y, 100)
    rep = heuristic_params(curve)

    def sse(x0):
        r = y - logistic_eval(LogisticParams(1, 100, x0, 1.44), x)
        return float(r @ r)

    gold = minimize_scalar(sse, bracket=(0.5, 5, 40), method="golden", tol=1e-10)
    assert rep.sse == pytest.approx(gold.fun, rel=1e-6, abs=1e-9)
    assert rep.params.x0 == pytest.approx(gold.x, rel=1e-3)


def test_sse_never_increases():
    rng = np.random.default_rng(8)
    y = logistic_eval(LogisticParams(1, 100, 6, 2.0), X) + rng.normal(0, 3, len(X))
    theta, ok, iters, sse, hist = levenberg_marquardt(
        X, y, np.array([10.0, 80.0, 20.0, 0.5]), np.ones(4, bool), ftol=1e-12
    )
    assert ok
    assert np.all(np.diff(hist) <= 0)


def test_iteration_cap_returns_best_so_far():
    y = logistic_eval(LogisticParams(1, 100, 6, 2.0), X)
    rep = fit_logistic(RankCurve(X, y, 10), LogisticParams(50, 60, 40, 0.1), max_iter=2)
    assert not rep.converged and rep.iterations == 2 and rep.message
    start = LogisticParams(50, 60, 40, 0.1)
    r0 = y - logistic_eval(start, X)
    assert rep.sse <= float(r0 @ r0)


def test_too_few_points():
    curve = RankCurve(np.array([1.0, 2.0, 3.0]), np.array([10.0, 50.0, 100.0]), 10)
    with pytest.raises(FitError):
        fit_logistic(curve)
    assert fit_logistic(curve, fixed=("a1",), init=LogisticParams(1, 100, 2, 1)).converged
    with pytest.raises(FitError):
        fit_logistic(curve, fixed=("x0",))


def test_evaluate_perfect_fit():
    t = LogisticParams(1, 100, 7, 1.5)
    curve = synthetic(t)
    ev = evaluate_fit(curve, t)
    assert ev.avg_abs_error == 0 and ev.std_dev == 0
    assert ev.kendall == ev.spearman == pytest.approx(1.0)
    assert ev.pearson == pytest.approx(1.0)


def test_evaluate_increasing_model_has_unit_rank_correlations():
    curve = rank_curve(np.random.default_rng(0).integers(1, 30, 500))
    ev = evaluate_fit(curve, LogisticParams(1, 100, 12, 1.44))
    assert ev.kendall == pytest.approx(1.0, abs=1e-12) and ev.spearman == pytest.approx(1.0, abs=1e-12)
    assert ev.avg_abs_error > 0


def test_constant_model_correlation_undefined():
    curve = rank_curve(np.arange(1, 20))
    with pytest.raises(UndefinedCorrelationError):
        evaluate_fit(curve, LogisticParams(50, 50, 3, 1))
