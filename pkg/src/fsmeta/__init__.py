"""Meta-learning toolkit for recommending a filter feature-selection method.

The package synthesizes a labeled repository of binary-classification
datasets, extracts dataset-level meta features, scores four candidate
filter methods with a cross-validated elimination protocol, and trains a
fuzzy-similarity classifier that recommends a method for unseen data.
"""

from .core_data import Dataset, FoldSplit, NormStats, load_csv, save_csv
from .evaluator import (
    EliminationCurve,
    LogisticModel,
    MethodScoreTable,
    best_method,
    elimination_curve,
    train_logistic,
    weighted_sum,
)
from .fs_rankers import FeatureRanking, FSMethod, rank
from .fuzzy_recommender import (
    MetaDataset,
    RecommenderModel,
    load_model,
    recommend,
    save_model,
    similarity,
    train_recommender,
)
from .meta_features import MetaFeatureVector, extract_meta
from .pipeline import EvaluationReport, RunConfig, build_meta_dataset, evaluate_suite
from .synthesizer import SynthManifest, SynthParams, sample_params, synthesize

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "EliminationCurve",
    "EvaluationReport",
    "FeatureRanking",
    "FoldSplit",
    "FSMethod",
    "LogisticModel",
    "MetaDataset",
    "MetaFeatureVector",
    "MethodScoreTable",
    "NormStats",
    "RecommenderModel",
    "RunConfig",
    "SynthManifest",
    "SynthParams",
    "best_method",
    "build_meta_dataset",
    "elimination_curve",
    "evaluate_suite",
    "extract_meta",
    "load_csv",
    "load_model",
    "rank",
    "recommend",
    "sample_params",
    "save_csv",
    "save_model",
    "similarity",
    "synthesize",
    "train_logistic",
    "train_recommender",
    "weighted_sum",
    "__version__",
]
