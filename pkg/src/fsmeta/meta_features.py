"""The six dataset-level meta features.

Sample count, feature count, average skewness (Pearson's asymmetry),
average pairwise feature correlation, average coefficient of variation and
average feature entropy. Labels play no part; the vector describes the
feature matrix alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_data import Dataset
from .fs_rankers import equal_width_codes

META_FEATURE_NAMES = ("ns", "nf", "aaf", "acf", "acvf", "aef")

# Features whose mean is this close to zero contribute 0 to the coefficient
# of variation instead of blowing up.
MEAN_FLOOR = 1e-12


@dataclass(frozen=True)
class MetaFeatureVector:
    ns: int
    nf: int
    aaf: float
    acf: float
    acvf: float
    aef: float

    def __post_init__(self):
        vec = self.as_array()
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"meta features must be finite, got {vec}")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.ns, self.nf, self.aaf, self.acf, self.acvf, self.aef],
            dtype=np.float64,
        )

    @classmethod
    def from_array(cls, vec) -> "MetaFeatureVector":
        ns, nf, aaf, acf, acvf, aef = (float(v) for v in vec)
        return cls(ns=int(ns), nf=int(nf), aaf=aaf, acf=acf, acvf=acvf, aef=aef)


def _sample_stds(values: np.ndarray) -> np.ndarray:
    if values.shape[0] > 1:
        return values.std(axis=0, ddof=1)
    return np.zeros(values.shape[1])


def compute_aaf(data: Dataset) -> float:
    """Average asymmetry: 3 * (mean - median) / std, averaged over features.

    Zero-variance features contribute 0.
    """
    values = data.values
    means = values.mean(axis=0)
    medians = np.median(values, axis=0)
    stds = _sample_stds(values)
    terms = np.where(stds > 0, 3.0 * (means - medians) / np.where(stds > 0, stds, 1.0), 0.0)
    return float(terms.mean())


def compute_acf(data: Dataset) -> float:
    """Mean Pearson correlation over all unordered feature pairs.

    Pairs involving a constant feature contribute 0; a single-feature
    dataset has no pairs and returns 0.
    """
    n = data.n_features
    if n < 2:
        return 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(data.values.T)
    corr = np.nan_to_num(corr, nan=0.0)
    upper = corr[np.triu_indices(n, k=1)]
    return float(upper.mean())


def compute_acvf(data: Dataset) -> float:
    """Average coefficient of variation, std / mean per feature (signed).

    Features with a mean within MEAN_FLOOR of zero contribute 0.
    """
    values = data.values
    means = values.mean(axis=0)
    stds = _sample_stds(values)
    safe = np.abs(means) > MEAN_FLOOR
    terms = np.where(safe, stds / np.where(safe, means, 1.0), 0.0)
    return float(terms.mean())


def feature_entropy(x: np.ndarray, bins: int = 10) -> float:
    """Entropy in nats of one feature under equal-width binning.

    Uses the same discretizer as the mutual-information estimator. A
    constant feature occupies a single bin and has zero entropy.
    """
    codes, n_bins = equal_width_codes(np.asarray(x, dtype=np.float64), bins)
    if n_bins == 1:
        return 0.0
    counts = np.bincount(codes, minlength=n_bins)
    p = counts[counts > 0] / len(codes)
    return float(-np.sum(p * np.log(p)))


def compute_aef(data: Dataset, bins: int = 10) -> float:
    """Average per-feature entropy (equal-width bins, natural log)."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    return float(
        np.mean([feature_entropy(data.values[:, j], bins) for j in range(data.n_features)])
    )


def extract_meta(data: Dataset, bins: int = 10) -> MetaFeatureVector:
    """Assemble the six meta features of a dataset."""
    return MetaFeatureVector(
        ns=data.n_samples,
        nf=data.n_features,
        aaf=compute_aaf(data),
        acf=compute_acf(data),
        acvf=compute_acvf(data),
        aef=compute_aef(data, bins),
    )
