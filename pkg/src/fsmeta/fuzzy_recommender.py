"""Fuzzy-similarity recommendation of a feature-selection method.

Training squashes the meta-feature rows into [eps, 1] (z-score, then an
affine map of the training range onto the unit interval) and condenses
each class into an ideal vector, the per-dimension geometric mean of its
members. A query is scored against every ideal vector with a generalized
Lukasiewicz similarity, and the best-matching class is recommended.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core_data import NormStats, apply_zscore_unit, fit_zscore
from .fs_rankers import METHOD_ORDER, FSMethod
from .meta_features import MetaFeatureVector

MODEL_FORMAT_VERSION = 1

# Exponent of the generalized mean inside the similarity measure: values
# are compared through their squares and the square root is taken outside.
MEAN_EXPONENT = 2


@dataclass(frozen=True)
class MetaDataset:
    """Meta-feature vectors labeled with the best method for their dataset."""

    rows: list[MetaFeatureVector]
    labels: list[FSMethod]
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.rows) != len(self.labels):
            raise ValueError("rows and labels must align")
        if self.provenance and len(self.provenance) != len(self.rows):
            raise ValueError("provenance must align with rows when given")

    def matrix(self) -> np.ndarray:
        return np.vstack([r.as_array() for r in self.rows])

    def present_classes(self) -> list[FSMethod]:
        present = set(self.labels)
        return [m for m in METHOD_ORDER if m in present]


@dataclass(frozen=True)
class RecommenderModel:
    norm: NormStats
    ideal_vectors: dict[FSMethod, np.ndarray]
    class_order: list[FSMethod]

    def __post_init__(self):
        for method, vec in self.ideal_vectors.items():
            if np.any(vec <= 0) or np.any(vec > 1):
                raise ValueError(f"ideal vector for {method} outside (0, 1]")


def ideal_vector(normalized_rows: np.ndarray) -> np.ndarray:
    """Per-dimension geometric mean of normalized class members.

    Inputs must be strictly positive, which the [eps, 1] normalization
    guarantees.
    """
    rows = np.asarray(normalized_rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if np.any(rows <= 0):
        raise ValueError("geometric mean needs strictly positive values")
    return np.exp(np.mean(np.log(rows), axis=0))


def similarity(y: np.ndarray, v: np.ndarray) -> float:
    """Generalized Lukasiewicz similarity of two vectors in [0, 1]^d.

    Per dimension sqrt(1 - |y^2 - v^2|), combined by geometric mean.
    Equal vectors score 1; the score is symmetric and stays in [0, 1].
    """
    y = np.asarray(y, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if y.shape != v.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {v.shape}")
    if np.any(y < 0) or np.any(y > 1) or np.any(v < 0) or np.any(v > 1):
        raise ValueError("similarity inputs must lie in [0, 1]")
    factors = np.sqrt(1.0 - np.abs(y**2 - v**2))
    return float(np.prod(factors) ** (1.0 / len(y)))


def train_recommender(meta: MetaDataset) -> RecommenderModel:
    """Fit the normalization on all meta rows and build per-class ideals.

    Classes absent from the training data get no ideal vector; they can
    never be recommended. At least two classes must be present.
    """
    if not meta.rows:
        raise ValueError("empty meta-dataset")
    classes = meta.present_classes()
    if len(classes) < 2:
        raise ValueError(f"need >= 2 classes in the meta-dataset, got {classes}")

    matrix = meta.matrix()
    norm = fit_zscore(matrix)
    normalized = apply_zscore_unit(matrix, norm)

    labels = np.array([METHOD_ORDER.index(lbl) for lbl in meta.labels])
    ideals = {
        method: ideal_vector(normalized[labels == METHOD_ORDER.index(method)])
        for method in classes
    }
    return RecommenderModel(norm=norm, ideal_vectors=ideals, class_order=classes)


def recommend(
    model: RecommenderModel, raw_meta: MetaFeatureVector
) -> tuple[FSMethod, dict[FSMethod, float]]:
    """Recommend a method for one unseen dataset's meta features.

    The raw vector is normalized with the model's training stats (values
    beyond the training range clamp to the interval ends) and compared to
    every ideal vector; ties break by the fixed class order.
    """
    query = apply_zscore_unit(raw_meta.as_array(), model.norm)
    sims = {
        method: similarity(query, model.ideal_vectors[method])
        for method in model.class_order
    }
    best = max(model.class_order, key=lambda m: (sims[m], -model.class_order.index(m)))
    return best, sims


def save_model(model: RecommenderModel, path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "norm": model.norm.to_dict(),
        "ideal_vectors": {m.value: model.ideal_vectors[m].tolist() for m in model.class_order},
        "class_order": [m.value for m in model.class_order],
        "mean_exponent": MEAN_EXPONENT,
    }
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> RecommenderModel:
    with open(Path(path), encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    class_order = [FSMethod(name) for name in doc["class_order"]]
    ideals = {
        FSMethod(name): np.asarray(vec, dtype=np.float64)
        for name, vec in doc["ideal_vectors"].items()
    }
    return RecommenderModel(
        norm=NormStats.from_dict(doc["norm"]),
        ideal_vectors=ideals,
        class_order=class_order,
    )
