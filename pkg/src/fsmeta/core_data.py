"""Dataset container, CSV I/O, normalization and stratified fold splitting.

Everything downstream (synthesis, ranking, evaluation, meta features,
recommendation) works on the `Dataset` type defined here.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

# Floor used when squashing values into the unit interval. The fuzzy
# similarity algebra needs strictly positive inputs <= 1, so normalized
# values are clamped to [UNIT_EPS, 1].
UNIT_EPS = 1e-6


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix with binary labels.

    values: S x N float matrix, labels: length-S vector of {0, 1}.
    Arrays are made read-only so instances can be shared freely.
    """

    values: np.ndarray
    labels: np.ndarray
    feature_names: list[str] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        if values.shape[0] < 2 or values.shape[1] < 1:
            raise ValueError(
                f"need at least 2 samples and 1 feature, got shape {values.shape}"
            )
        if labels.ndim != 1 or labels.shape[0] != values.shape[0]:
            raise ValueError(
                f"label count {labels.shape} does not match row count {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("values contain NaN or infinity")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 or 1")
        if self.feature_names is not None and len(self.feature_names) != values.shape[1]:
            raise ValueError("feature_names length does not match column count")
        values.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def class_counts(self) -> tuple[int, int]:
        return int(np.sum(self.labels == 0)), int(np.sum(self.labels == 1))

    def subset(self, rows: Sequence[int]) -> "Dataset":
        """Row-subset copy sharing feature names."""
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.values[rows], self.labels[rows], self.feature_names)


@dataclass(frozen=True)
class NormStats:
    """Per-feature z-score parameters plus the post-z-score train range."""

    means: np.ndarray
    stds: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        n = len(self.means)
        if not (len(self.stds) == len(self.mins) == len(self.maxs) == n):
            raise ValueError("NormStats vectors must share one length")
        if np.any(self.stds <= 0):
            raise ValueError("stds must be strictly positive")
        if np.any(self.maxs < self.mins):
            raise ValueError("maxs must be >= mins")

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
            "mins": self.mins.tolist(),
            "maxs": self.maxs.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(
            means=np.asarray(d["means"], dtype=np.float64),
            stds=np.asarray(d["stds"], dtype=np.float64),
            mins=np.asarray(d["mins"], dtype=np.float64),
            maxs=np.asarray(d["maxs"], dtype=np.float64),
        )


@dataclass(frozen=True)
class FoldSplit:
    train_indices: np.ndarray
    test_indices: np.ndarray


def _parse_label_column(header: list[str] | None, width: int, label_column) -> int:
    if isinstance(label_column, int):
        col = label_column if label_column >= 0 else width + label_column
        if not 0 <= col < width:
            raise ValueError(f"label column index {label_column} out of range for {width} columns")
        return col
    if header is None:
        raise ValueError(f"label column {label_column!r} given by name but file has no header")
    try:
        return header.index(str(label_column))
    except ValueError:
        raise ValueError(f"label column {label_column!r} not found in header {header}") from None


def load_csv(path, label_column: int | str = -1) -> Dataset:
    """Load a Dataset from a comma-separated file.

    The label column (last by default, or selected by index/name) must hold
    exactly two distinct values; they map to {0, 1} by ascending textual
    sort. A header row is detected when any first-row cell fails to parse
    as a number, and then populates feature_names.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")

    width = len(rows[0])
    header = None
    if isinstance(label_column, str):
        # A named label column implies a header row.
        header = [cell.strip() for cell in rows[0]]
        label_idx = _parse_label_column(header, width, label_column)
        rows = rows[1:]
    else:
        label_idx = _parse_label_column(None, width, label_column)
        # Header detection looks at feature cells only; the label column may
        # legitimately hold non-numeric class names in every row.
        def _numeric(cell: str) -> bool:
            try:
                float(cell)
                return True
            except ValueError:
                return False

        if any(not _numeric(rows[0][j]) for j in range(width) if j != label_idx):
            header = [cell.strip() for cell in rows[0]]
            rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows after header")

    feature_cols = [j for j in range(width) if j != label_idx]

    values = np.empty((len(rows), len(feature_cols)), dtype=np.float64)
    raw_labels = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        for out_j, j in enumerate(feature_cols):
            try:
                v = float(row[j])
            except ValueError:
                raise ValueError(
                    f"{path}: row {i + 1}, column {j + 1}: cannot parse {row[j]!r} as a number"
                ) from None
            if not np.isfinite(v):
                raise ValueError(f"{path}: row {i + 1}, column {j + 1}: non-finite value {row[j]!r}")
            values[i, out_j] = v
        raw_labels.append(row[label_idx].strip())

    distinct = sorted(set(raw_labels))
    if len(distinct) != 2:
        raise ValueError(
            f"{path}: non-binary labels, found {len(distinct)} distinct value(s): {distinct[:5]}"
        )
    mapping = {distinct[0]: 0, distinct[1]: 1}
    labels = np.array([mapping[s] for s in raw_labels], dtype=np.int64)

    names = None
    if header is not None:
        names = [header[j] for j in feature_cols]
    return Dataset(values, labels, names)


def save_csv(data: Dataset, path) -> None:
    """Write a Dataset as CSV, label in the last column.

    Floats are written with repr so a reload reproduces them exactly.
    A header is emitted only when the dataset carries feature names.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if data.feature_names is not None:
            writer.writerow(list(data.feature_names) + ["label"])
        for row, label in zip(data.values, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def fit_zscore(values: np.ndarray, rows: Sequence[int] | None = None) -> NormStats:
    """Fit per-feature z-score stats (sample std) on the given rows.

    Zero-variance features get std 1 so their z-scores collapse to 0.
    mins/maxs record the per-feature range of the z-scored fitting rows,
    used later to squash values onto [0, 1].
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    sub = values if rows is None else values[np.asarray(rows, dtype=np.int64)]
    if sub.shape[0] == 0:
        raise ValueError("cannot fit normalization on an empty row set")

    means = sub.mean(axis=0)
    if sub.shape[0] > 1:
        stds = sub.std(axis=0, ddof=1)
    else:
        stds = np.zeros(sub.shape[1])
    stds = np.where(stds > 0, stds, 1.0)

    z = (sub - means) / stds
    return NormStats(means=means, stds=stds, mins=z.min(axis=0), maxs=z.max(axis=0))


def apply_zscore(values: np.ndarray, stats: NormStats) -> np.ndarray:
    """Plain z-score transform with fitted stats (no range squashing)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape[-1] != len(stats.means):
        raise ValueError(
            f"column count {values.shape[-1]} does not match stats length {len(stats.means)}"
        )
    return (values - stats.means) / stats.stds


def apply_zscore_unit(values: np.ndarray, stats: NormStats) -> np.ndarray:
    """Z-score, rescale so the train min/max land on 0/1, clamp to [eps, 1].

    Accepts a single row or a matrix. Values outside the training range
    clamp to the interval ends; the output is always inside [UNIT_EPS, 1],
    which keeps geometric means and the fuzzy similarity algebra defined.
    """
    z = apply_zscore(values, stats)
    span = stats.maxs - stats.mins
    span = np.where(span > 0, span, 1.0)
    unit = (z - stats.mins) / span
    return np.clip(unit, UNIT_EPS, 1.0)


def stratified_kfold(data: Dataset, k: int, seed: int) -> list[FoldSplit]:
    """Deterministic stratified k-fold splits.

    Each class is shuffled with the seed and dealt into k nearly equal
    chunks, so every test fold holds each class's count within +-1 of an
    even share. k is lowered to the minority-class count when a class has
    fewer than k samples.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    n0, n1 = data.class_counts()
    if min(n0, n1) < 2:
        raise ValueError(f"each class needs >= 2 samples, got counts {n0}/{n1}")
    if min(n0, n1) < k:
        logger.warning(
            "lowering k from %d to minority class count %d", k, min(n0, n1)
        )
        k = min(n0, n1)

    rng = np.random.default_rng(seed)
    test_sets: list[list[int]] = [[] for _ in range(k)]
    for cls in (0, 1):
        idx = rng.permutation(np.flatnonzero(data.labels == cls))
        for j, chunk in enumerate(np.array_split(idx, k)):
            test_sets[j].extend(int(i) for i in chunk)

    all_idx = np.arange(data.n_samples)
    splits = []
    for test in test_sets:
        test_arr = np.array(sorted(test), dtype=np.int64)
        mask = np.ones(data.n_samples, dtype=bool)
        mask[test_arr] = False
        splits.append(FoldSplit(train_indices=all_idx[mask], test_indices=test_arr))
    return splits
