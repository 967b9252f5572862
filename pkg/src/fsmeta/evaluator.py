"""Scoring a feature ranking by the feature-elimination protocol.

A ranking is evaluated by cross-validated logistic regression while the
least significant features are removed one at a time; the resulting
accuracy curve collapses to a single weighted-sum score that weights
accuracies by the fraction of features removed. The classifier is a small
self-contained logistic regression trained by gradient descent with
backtracking line search, so runs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from scipy.special import expit

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is in the default install
    njit = None

from . import core_data
from .core_data import Dataset
from .fs_rankers import METHOD_ORDER, FeatureRanking, FSMethod, rank


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    iterations: int
    final_loss: float

    def decision(self, x: np.ndarray) -> np.ndarray:
        return x @ self.weights + self.bias

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.decision(x) >= 0.0).astype(np.int64)

    def accuracy(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean(self.predict(x) == y))


@dataclass(frozen=True)
class EliminationCurve:
    """mean_accuracy[k-1] is the cross-validated accuracy after removing
    the k least significant features, for k = 1 .. N-1."""

    mean_accuracy: np.ndarray
    n_features: int

    def __post_init__(self):
        if len(self.mean_accuracy) != self.n_features - 1:
            raise ValueError("curve must have N-1 entries")
        if np.any(self.mean_accuracy < 0) or np.any(self.mean_accuracy > 1):
            raise ValueError("accuracies must lie in [0, 1]")


@dataclass(frozen=True)
class MethodScoreTable:
    ws: dict[FSMethod, float]
    best_method: FSMethod
    curves: dict[FSMethod, EliminationCurve] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ws": {m.value: self.ws[m] for m in self.ws},
            "best_method": self.best_method.value,
        }


def _loss_and_grad(
    x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float
) -> tuple[float, np.ndarray, float]:
    z = x @ w + b
    # logaddexp(0, z) - y*z is the per-sample negative log-likelihood.
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w))
    p = 1.0 / (1.0 + np.exp(-z))
    residual = p - y
    grad_w = x.T @ residual / len(y) + l2 * w
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def _loss_only(x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float) -> float:
    z = x @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w))


def _gd_fit_numpy(x, y, l2, max_iter, tol):
    """Vectorized fallback for the compiled kernel below; same algorithm.

    Tracks the decision values z = Xw + b and the squared weight norm
    incrementally, so a line-search trial costs one vector update instead
    of a matrix product.
    """
    s = x.shape[0]
    inv_s = 1.0 / s
    w = np.zeros(x.shape[1])
    b = 0.0
    z = np.zeros(s)
    w_sq = 0.0
    loss = float(np.log(2.0))  # mean logaddexp(0, 0); the y.z term is 0
    step = 1.0
    iterations = 0
    while iterations < max_iter:
        if not np.isfinite(loss):
            return w, b, -1, loss
        residual = expit(z) - y
        grad_w = x.T @ residual * inv_s + l2 * w
        grad_b = float(residual.sum() * inv_s)
        if max(float(np.max(np.abs(grad_w))), abs(grad_b)) < tol:
            break
        dz = x @ grad_w + grad_b
        g_dot_g = float(grad_w @ grad_w)
        w_dot_g = float(w @ grad_w)
        grad_sq = g_dot_g + grad_b * grad_b
        while True:
            z_new = z - step * dz
            w_sq_new = w_sq - 2.0 * step * w_dot_g + step * step * g_dot_g
            loss_new = float(
                (np.logaddexp(0.0, z_new).sum() - y @ z_new) * inv_s
                + 0.5 * l2 * w_sq_new
            )
            if loss_new <= loss - 1e-4 * step * grad_sq or step < 1e-12:
                break
            step *= 0.5
        w = w - step * grad_w
        b -= step * grad_b
        z, w_sq, loss = z_new, w_sq_new, loss_new
        step *= 2.0
        iterations += 1
    return w, b, iterations, loss


if njit is not None:

    @njit(cache=True)
    def _gd_fit(x, y, l2, max_iter, tol):  # pragma: no cover - exercised via wrapper
        s, n = x.shape
        inv_s = 1.0 / s
        w = np.zeros(n)
        b = 0.0
        z = np.zeros(s)
        z_new = np.empty(s)
        dz = np.empty(s)
        grad_w = np.empty(n)
        w_sq = 0.0
        loss = np.log(2.0)
        step = 1.0
        iterations = 0
        while iterations < max_iter:
            if not np.isfinite(loss):
                return w, b, -1, loss
            gb = 0.0
            for j in range(n):
                grad_w[j] = l2 * w[j]
            for i in range(s):
                zi = z[i]
                if zi >= 0.0:
                    p = 1.0 / (1.0 + np.exp(-zi))
                else:
                    e = np.exp(zi)
                    p = e / (1.0 + e)
                r = (p - y[i]) * inv_s
                gb += r
                for j in range(n):
                    grad_w[j] += r * x[i, j]
            gmax = abs(gb)
            for j in range(n):
                a = abs(grad_w[j])
                if a > gmax:
                    gmax = a
            if gmax < tol:
                break
            g_dot_g = 0.0
            w_dot_g = 0.0
            for j in range(n):
                g_dot_g += grad_w[j] * grad_w[j]
                w_dot_g += w[j] * grad_w[j]
            grad_sq = g_dot_g + gb * gb
            for i in range(s):
                acc = gb
                for j in range(n):
                    acc += x[i, j] * grad_w[j]
                dz[i] = acc
            while True:
                data = 0.0
                for i in range(s):
                    zi = z[i] - step * dz[i]
                    z_new[i] = zi
                    if zi > 0.0:
                        data += zi + np.log1p(np.exp(-zi)) - y[i] * zi
                    else:
                        data += np.log1p(np.exp(zi)) - y[i] * zi
                w_sq_new = w_sq - 2.0 * step * w_dot_g + step * step * g_dot_g
                loss_new = data * inv_s + 0.5 * l2 * w_sq_new
                if loss_new <= loss - 1e-4 * step * grad_sq or step < 1e-12:
                    break
                step *= 0.5
            for j in range(n):
                w[j] -= step * grad_w[j]
            b -= step * gb
            for i in range(s):
                z[i] = z_new[i]
            w_sq = w_sq_new
            loss = loss_new
            step *= 2.0
            iterations += 1
        return w, b, iterations, loss

else:  # pragma: no cover
    _gd_fit = _gd_fit_numpy


def train_logistic(
    x: np.ndarray,
    y: np.ndarray,
    l2: float = 1e-4,
    max_iter: int = 500,
    tol: float = 1e-6,
) -> LogisticModel:
    """Fit L2-regularized logistic regression (bias unpenalized).

    Plain gradient descent from zero weights with Armijo backtracking;
    the accepted step doubles as the next trial step. Stops when the
    gradient infinity-norm falls below tol or after max_iter steps.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != len(y):
        raise ValueError("x must be 2-D with one row per label")
    w, b, iterations, loss = _gd_fit(x, y, l2, max_iter, tol)
    if iterations < 0:
        raise ValueError("non-finite loss during logistic training")
    return LogisticModel(weights=w, bias=float(b), iterations=int(iterations),
                         final_loss=float(loss))


def weighted_sum(curve: EliminationCurve) -> float:
    """WS = sum over k of accuracy-after-removing-k times k/N.

    Accuracies earned with fewer (more significant) features carry more
    weight; the maximum attainable value is (N-1)/2.
    """
    n = curve.n_features
    k = np.arange(1, n)
    return float(np.sum(curve.mean_accuracy * (k / n)))


RankerFn = Callable[[Dataset], FeatureRanking]


def curve_for_ranker(
    data: Dataset,
    rank_fn: RankerFn,
    k_folds: int = 10,
    seed: int = 0,
    _fold_cache: dict | None = None,
) -> EliminationCurve:
    """Elimination curve for an arbitrary ranking function.

    Per fold: z-score stats and the ranking are fitted on the training
    split only, then for every removed-feature count k the classifier is
    trained on the top N-k features and scored on the test split. The
    curve is the per-k mean over folds.
    """
    n = data.n_features
    if n < 2:
        raise ValueError("elimination curve needs at least 2 features")
    folds = core_data.stratified_kfold(data, k_folds, seed)
    acc = np.zeros((len(folds), n - 1))
    for f, fold in enumerate(folds):
        train_rows = fold.train_indices
        test_rows = fold.test_indices
        stats = core_data.fit_zscore(data.values, train_rows)
        x_train = core_data.apply_zscore(data.values[train_rows], stats)
        x_test = core_data.apply_zscore(data.values[test_rows], stats)
        y_train = data.labels[train_rows]
        y_test = data.labels[test_rows]

        ranking = rank_fn(data.subset(train_rows))
        cache = None if _fold_cache is None else _fold_cache.setdefault(f, {})
        for k in range(1, n):
            kept = np.sort(ranking.order[: n - k])
            key = kept.tobytes()
            if cache is not None and key in cache:
                acc[f, k - 1] = cache[key]
                continue
            model = train_logistic(x_train[:, kept], y_train)
            acc[f, k - 1] = model.accuracy(x_test[:, kept], y_test)
            if cache is not None:
                cache[key] = acc[f, k - 1]

    return EliminationCurve(mean_accuracy=acc.mean(axis=0), n_features=n)


def elimination_curve(
    data: Dataset,
    method: FSMethod,
    k_folds: int = 10,
    seed: int = 0,
    ranker_params: dict | None = None,
) -> EliminationCurve:
    """Elimination curve for one of the four candidate methods."""
    params = ranker_params or {}
    return curve_for_ranker(
        data, lambda train: rank(train, method, **params), k_folds, seed
    )


def best_method(
    data: Dataset,
    k_folds: int = 10,
    seed: int = 0,
    ranker_params: dict[FSMethod, dict] | None = None,
) -> MethodScoreTable:
    """Score all four methods on identical fold splits and pick the winner.

    Ties on the weighted sum break by the fixed method order
    GIFS < ReliefF < MIFS < IFS. Identical feature subsets hit a shared
    per-fold accuracy cache, so agreeing rankings cost nothing extra.
    """
    ranker_params = ranker_params or {}
    fold_cache: dict = {}
    ws: dict[FSMethod, float] = {}
    curves: dict[FSMethod, EliminationCurve] = {}
    for method in METHOD_ORDER:
        params = ranker_params.get(method, {})
        curve = curve_for_ranker(
            data,
            lambda train, m=method, p=params: rank(train, m, **p),
            k_folds,
            seed,
            _fold_cache=fold_cache,
        )
        curves[method] = curve
        ws[method] = weighted_sum(curve)

    winner = max(METHOD_ORDER, key=lambda m: (ws[m], -METHOD_ORDER.index(m)))
    return MethodScoreTable(ws=ws, best_method=winner, curves=curves)
