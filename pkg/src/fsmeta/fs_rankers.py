"""The four filter feature-selection methods.

Each ranker scores every feature and returns a full ranking, most
significant first. Ties always break toward the lower original feature
index, so rankings are deterministic and reproducible.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from .core_data import Dataset

logger = logging.getLogger(__name__)


class FSMethod(enum.Enum):
    """Candidate methods, in the fixed order used to break score ties."""

    GIFS = "GIFS"
    RELIEFF = "ReliefF"
    MIFS = "MIFS"
    IFS = "IFS"

    def __str__(self) -> str:
        return self.value


METHOD_ORDER = list(FSMethod)


def method_from_name(name: str) -> FSMethod:
    for m in FSMethod:
        if name.lower() in (m.value.lower(), m.name.lower()):
            return m
    raise ValueError(f"unknown FS method {name!r}; expected one of "
                     f"{[m.value for m in FSMethod]}")


@dataclass(frozen=True)
class FeatureRanking:
    """Feature indices ordered most to least significant, with raw scores.

    scores stays aligned to the original feature indices; order is the
    permutation produced by sorting scores descending, ties by lower index.
    """

    order: np.ndarray
    scores: np.ndarray
    method: FSMethod
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        order = np.asarray(self.order, dtype=np.int64)
        scores = np.asarray(self.scores, dtype=np.float64)
        if sorted(order.tolist()) != list(range(len(scores))):
            raise ValueError("order must be a permutation of the feature indices")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "scores", scores)

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "order": self.order.tolist(),
            "scores": self.scores.tolist(),
            "params": dict(self.params),
        }


@dataclass(frozen=True)
class Histogram2D:
    """Joint counts of a binned feature against a discrete variable."""

    counts: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")


def _order_from_scores(scores: np.ndarray) -> np.ndarray:
    # Stable sort on negated scores: descending scores, ties by lower index.
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def _require_both_classes(data: Dataset) -> None:
    n0, n1 = data.class_counts()
    if n0 == 0 or n1 == 0:
        raise ValueError("ranking requires both classes present")


def equal_width_codes(x: np.ndarray, bins: int) -> tuple[np.ndarray, int]:
    """Equal-width bin codes over [min, max]; a constant column gets 1 bin."""
    x = np.asarray(x, dtype=np.float64)
    lo, hi = x.min(), x.max()
    if hi <= lo:
        return np.zeros(len(x), dtype=np.int64), 1
    codes = np.floor((x - lo) / (hi - lo) * bins).astype(np.int64)
    return np.minimum(codes, bins - 1), bins


def _discrete_mi(a: np.ndarray, n_a: int, b: np.ndarray, n_b: int) -> float:
    joint = np.zeros((n_a, n_b))
    np.add.at(joint, (a, b), 1.0)
    joint /= len(a)
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    mi = float(np.sum(joint[mask] * np.log(joint[mask] / (pa @ pb)[mask])))
    return max(mi, 0.0)


def joint_histogram(x: np.ndarray, y: np.ndarray, bins: int) -> Histogram2D:
    """Histogram of x (equal-width bins) against the binary labels y."""
    codes, n_bins = equal_width_codes(x, bins)
    counts = np.zeros((n_bins, 2))
    np.add.at(counts, (codes, np.asarray(y, dtype=np.int64)), 1.0)
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        edges = np.array([lo, lo + 1.0])
    else:
        edges = np.linspace(lo, hi, n_bins + 1)
    return Histogram2D(counts=counts, edges=edges)


def mutual_information(x: np.ndarray, y: np.ndarray, bins: int) -> float:
    """MI in nats between a real vector (equal-width binned) and 0/1 labels."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    codes, n_bins = equal_width_codes(x, bins)
    return _discrete_mi(codes, n_bins, y, 2)


def rank_gini(train: Dataset) -> FeatureRanking:
    """Gini index ranking: best binary-split impurity gain per feature.

    For each feature, candidate thresholds are midpoints between consecutive
    distinct sorted values; the score is the largest drop from the parent
    Gini impurity to the weighted impurity of the two sides. A constant
    feature has no valid split and scores 0.
    """
    _require_both_classes(train)
    y = train.labels
    s = train.n_samples
    p1 = y.mean()
    parent = 1.0 - (p1**2 + (1 - p1) ** 2)

    scores = np.zeros(train.n_features)
    for j in range(train.n_features):
        col = train.values[:, j]
        sort_idx = np.argsort(col, kind="stable")
        xs = col[sort_idx]
        ys = y[sort_idx]
        # Prefix class-1 counts; split after position i puts i+1 rows left.
        ones = np.cumsum(ys)
        boundaries = np.flatnonzero(np.diff(xs) > 0)
        if len(boundaries) == 0:
            continue
        n_left = boundaries + 1.0
        n_right = s - n_left
        ones_left = ones[boundaries]
        ones_right = ones[-1] - ones_left
        pl = ones_left / n_left
        pr = ones_right / n_right
        gini_left = 1.0 - (pl**2 + (1 - pl) ** 2)
        gini_right = 1.0 - (pr**2 + (1 - pr) ** 2)
        weighted = (n_left * gini_left + n_right * gini_right) / s
        scores[j] = parent - weighted.min()

    return FeatureRanking(order=_order_from_scores(scores), scores=scores, method=FSMethod.GIFS)


def rank_relieff(
    train: Dataset, k_neighbors: int = 10, iterations: int | None = None
) -> FeatureRanking:
    """ReliefF weights via nearest hits and misses on min-max scaled data.

    Every sample (or the first `iterations` of them) contributes: its k
    nearest same-class neighbours pull feature weights down by the mean
    per-feature difference, its k nearest other-class neighbours push them
    up. Distances are Manhattan on features scaled to [0, 1], neighbour
    ties resolve toward the lower sample index. k is lowered per class when
    a class is too small.
    """
    _require_both_classes(train)
    y = train.labels
    s = train.n_samples
    m = s if iterations is None else min(iterations, s)
    if m < 1:
        raise ValueError("iterations must be >= 1")

    x = train.values
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    xn = (x - lo) / span

    counts = {0: int(np.sum(y == 0)), 1: int(np.sum(y == 1))}
    k_hit = {c: min(k_neighbors, counts[c] - 1) for c in (0, 1)}
    k_miss = {c: min(k_neighbors, counts[1 - c]) for c in (0, 1)}
    if any(k_hit[c] < k_neighbors for c in (0, 1)):
        logger.warning(
            "ReliefF k lowered per class: hits %s, misses %s (requested %d)",
            k_hit, k_miss, k_neighbors,
        )
    if min(k_hit.values()) < 1:
        raise ValueError("each class needs at least 2 samples for ReliefF")

    weights = np.zeros(train.n_features)
    for i in range(m):
        diffs = np.abs(xn - xn[i])
        dist = diffs.sum(axis=1)
        c = int(y[i])
        hit_pool = np.flatnonzero(y == c)
        hit_pool = hit_pool[hit_pool != i]
        miss_pool = np.flatnonzero(y != c)
        # argsort is stable over the index-ordered pools: distance ties
        # resolve toward the lower sample index.
        hits = hit_pool[np.argsort(dist[hit_pool], kind="stable")[: k_hit[c]]]
        misses = miss_pool[np.argsort(dist[miss_pool], kind="stable")[: k_miss[c]]]
        weights -= diffs[hits].sum(axis=0) / (k_hit[c] * m)
        weights += diffs[misses].sum(axis=0) / (k_miss[c] * m)

    return FeatureRanking(
        order=_order_from_scores(weights),
        scores=weights,
        method=FSMethod.RELIEFF,
        params={"k_neighbors": k_neighbors, "iterations": m},
    )


def rank_mifs(train: Dataset, beta: float = 0.5, bins: int = 10) -> FeatureRanking:
    """Battiti's greedy mutual-information ranking with redundancy penalty.

    The first pick maximizes I(feature; labels); each later pick maximizes
    I(f; labels) - beta * sum of I(f; s) over already selected s, with
    feature-feature MI using the same equal-width binning. The stored score
    of each feature is its criterion value at selection time.
    """
    _require_both_classes(train)
    n = train.n_features
    codes = []
    n_codes = []
    for j in range(n):
        cj, nj = equal_width_codes(train.values[:, j], bins)
        codes.append(cj)
        n_codes.append(nj)
    y = train.labels
    relevance = np.array([_discrete_mi(codes[j], n_codes[j], y, 2) for j in range(n)])

    selected: list[int] = []
    scores = np.zeros(n)
    penalty = np.zeros(n)
    remaining = list(range(n))
    while remaining:
        criterion = relevance - beta * penalty
        best = min(remaining, key=lambda j: (-criterion[j], j))
        scores[best] = criterion[best]
        selected.append(best)
        remaining.remove(best)
        for j in remaining:
            penalty[j] += _discrete_mi(codes[j], n_codes[j], codes[best], n_codes[best])

    return FeatureRanking(
        order=np.array(selected, dtype=np.int64),
        scores=scores,
        method=FSMethod.MIFS,
        params={"beta": beta, "bins": bins},
    )


def _spearman_abs(values: np.ndarray) -> np.ndarray:
    """|Spearman rho| matrix; pairs involving a constant column get 0."""
    n = values.shape[1]
    ranks = np.column_stack([rankdata(values[:, j]) for j in range(n)])
    constant = ranks.std(axis=0) == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.corrcoef(ranks.T) if n > 1 else np.ones((1, 1))
    rho = np.atleast_2d(rho)
    rho[np.isnan(rho)] = 0.0
    rho[constant, :] = 0.0
    rho[:, constant] = 0.0
    np.fill_diagonal(rho, 1.0)
    return np.abs(rho)


def rank_infinite(
    train: Dataset, alpha: float = 0.5, r_factor: float = 0.9
) -> FeatureRanking:
    """Infinite feature selection: aggregate weighted paths of all lengths.

    Features form a graph whose edge weights mix spread (max of the two
    min-max normalized standard deviations) and non-redundancy (1 minus
    absolute Spearman correlation). Summing r^L * A^L over every path
    length L gives (I - rA)^-1 - I with r scaled below the spectral radius;
    a feature's score is its row sum in that series.
    """
    _require_both_classes(train)
    n = train.n_features
    stds = train.values.std(axis=0, ddof=1) if train.n_samples > 1 else np.zeros(n)
    span = stds.max() - stds.min()
    sigma_hat = (stds - stds.min()) / span if span > 0 else np.zeros(n)

    spread = np.maximum.outer(sigma_hat, sigma_hat)
    adjacency = alpha * spread + (1 - alpha) * (1.0 - _spearman_abs(train.values))

    eigvals = np.linalg.eigvalsh(adjacency)
    spectral_radius = float(np.max(np.abs(eigvals)))
    r = r_factor / spectral_radius if spectral_radius > 1e-12 else r_factor

    system = np.eye(n) - r * adjacency
    try:
        energy = np.linalg.inv(system) - np.eye(n)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"path-energy system is singular (r={r})") from exc
    scores = energy.sum(axis=1)

    return FeatureRanking(
        order=_order_from_scores(scores),
        scores=scores,
        method=FSMethod.IFS,
        params={"alpha": alpha, "r_factor": r_factor},
    )


RANKERS: dict[FSMethod, Callable[..., FeatureRanking]] = {
    FSMethod.GIFS: rank_gini,
    FSMethod.RELIEFF: rank_relieff,
    FSMethod.MIFS: rank_mifs,
    FSMethod.IFS: rank_infinite,
}


def rank(train: Dataset, method: FSMethod, **params) -> FeatureRanking:
    """Run one ranker by method enum, forwarding its hyperparameters."""
    return RANKERS[method](train, **params)
