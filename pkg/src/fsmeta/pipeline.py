"""End-to-end orchestration: repository build, meta-dataset construction,
suite evaluation and curve reports.

The repository build is embarrassingly parallel over dataset indices; every
worker is a pure function of the derived per-index seed, and results are
reduced in index order, so the emitted artifacts are byte-identical for any
worker count. Each finished index persists its own result file, which lets
an interrupted build resume without recomputing.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .core_data import Dataset, load_csv
from .evaluator import EliminationCurve, MethodScoreTable, best_method
from .fs_rankers import METHOD_ORDER, FSMethod
from .fuzzy_recommender import MetaDataset, RecommenderModel, recommend
from .meta_features import META_FEATURE_NAMES, MetaFeatureVector, extract_meta
from .synthesizer import (
    dataset_path,
    manifest_path,
    param_seed,
    sample_params,
    synthesize,
    write_pair,
)

logger = logging.getLogger(__name__)

META_CSV_HEADER = list(META_FEATURE_NAMES) + ["label"]


@dataclass(frozen=True)
class RunConfig:
    """Knobs for a repository build / evaluation run."""

    count: int = 1000
    master_seed: int = 1
    folds: int = 10
    jobs: int = 1
    out_dir: Path = Path("fsmeta_out")
    p6_max: int = 70
    ranker_params: dict[FSMethod, dict] = field(default_factory=dict)

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        object.__setattr__(self, "out_dir", Path(self.out_dir))


@dataclass(frozen=True)
class EvaluationReport:
    """Table-shaped comparison of ground truth vs recommendation."""

    rows: list[dict]
    best_counts: dict[FSMethod, int]
    recommended_counts: dict[FSMethod, int]
    hits: int
    dataset_count: int

    @property
    def success_rate(self) -> float:
        return self.hits / self.dataset_count if self.dataset_count else 0.0

    def to_dict(self) -> dict:
        return {
            "datasets": self.rows,
            "summary": {
                "dataset_count": self.dataset_count,
                "hits": self.hits,
                "success_rate": self.success_rate,
                "best_counts": {m.value: self.best_counts[m] for m in METHOD_ORDER},
                "recommended_counts": {
                    m.value: self.recommended_counts[m] for m in METHOD_ORDER
                },
            },
        }


def meta_result_path(out_dir, index: int) -> Path:
    return Path(out_dir) / f"ds_{index}.meta.json"


def _build_one(task: tuple) -> tuple[int, dict | None, str | None]:
    """Worker: synthesize dataset `index`, persist it, score and label it."""
    index, out_dir, master_seed, folds, p6_max, ranker_params = task
    try:
        seed = param_seed(master_seed, index)
        params = sample_params(seed, p6_max)
        data, manifest = synthesize(params)
        write_pair(out_dir, index, data, manifest)
        meta = extract_meta(data)
        table = best_method(data, k_folds=folds, seed=seed, ranker_params=ranker_params)
        row = {
            "index": index,
            "param_seed": seed,
            "p6_max": p6_max,
            "folds": folds,
            "ns": meta.ns,
            "nf": meta.nf,
            "aaf": meta.aaf,
            "acf": meta.acf,
            "acvf": meta.acvf,
            "aef": meta.aef,
            "label": table.best_method.value,
            "ws": {m.value: table.ws[m] for m in METHOD_ORDER},
        }
        with open(meta_result_path(out_dir, index), "w", encoding="utf-8") as fh:
            json.dump(row, fh, indent=1)
            fh.write("\n")
        return index, row, None
    except Exception as exc:  # noqa: BLE001 - worker reports, parent decides
        return index, None, f"{type(exc).__name__}: {exc}"


def _completed_row(out_dir, index: int, config: RunConfig) -> dict | None:
    """Load a prior result if all three per-index files survive.

    Results from a different seed, cluster cap or fold count are ignored
    and recomputed; resume must never mix configurations.
    """
    result = meta_result_path(out_dir, index)
    if (
        result.exists()
        and dataset_path(out_dir, index).exists()
        and manifest_path(out_dir, index).exists()
    ):
        with open(result, encoding="utf-8") as fh:
            row = json.load(fh)
        if (
            row.get("param_seed") == param_seed(config.master_seed, index)
            and row.get("p6_max") == config.p6_max
            and row.get("folds") == config.folds
        ):
            return row
    return None


def _meta_row_to_vector(row: dict) -> MetaFeatureVector:
    return MetaFeatureVector(
        ns=int(row["ns"]),
        nf=int(row["nf"]),
        aaf=float(row["aaf"]),
        acf=float(row["acf"]),
        acvf=float(row["acvf"]),
        aef=float(row["aef"]),
    )


def build_meta_dataset(config: RunConfig) -> MetaDataset:
    """Build the training repository and its labeled meta-dataset.

    Emits per index: the dataset CSV, its manifest, and a meta result JSON.
    Afterwards writes meta.csv (one labeled row per dataset, index order)
    and provenance.json linking rows to their source files. Indices whose
    evaluation fails are skipped and listed in the provenance; the build
    carries on.
    """
    out_dir = config.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    results: dict[int, dict] = {}
    errors: dict[int, str] = {}
    pending = []
    for i in range(config.count):
        row = _completed_row(out_dir, i, config)
        if row is not None:
            results[i] = row
        else:
            pending.append(i)

    tasks = [
        (i, out_dir, config.master_seed, config.folds, config.p6_max, config.ranker_params)
        for i in pending
    ]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(_build_one, tasks))
    else:
        outcomes = [_build_one(t) for t in tasks]
    for index, row, error in outcomes:
        if error is not None:
            logger.warning("dataset %d skipped: %s", index, error)
            errors[index] = error
        else:
            results[index] = row

    rows: list[MetaFeatureVector] = []
    labels: list[FSMethod] = []
    provenance_rows = []
    with open(out_dir / "meta.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(META_CSV_HEADER)
        for i in range(config.count):
            if i not in results:
                continue
            row = results[i]
            vec = _meta_row_to_vector(row)
            rows.append(vec)
            labels.append(FSMethod(row["label"]))
            writer.writerow(
                [row["ns"], row["nf"]]
                + [repr(float(row[k])) for k in ("aaf", "acf", "acvf", "aef")]
                + [row["label"]]
            )
            provenance_rows.append(
                {
                    "index": i,
                    "dataset": dataset_path(out_dir, i).name,
                    "manifest": manifest_path(out_dir, i).name,
                    "param_seed": row["param_seed"],
                }
            )
    with open(out_dir / "provenance.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "master_seed": config.master_seed,
                "count": config.count,
                "folds": config.folds,
                "p6_max": config.p6_max,
                "rows": provenance_rows,
                "skipped": [{"index": i, "error": errors[i]} for i in sorted(errors)],
            },
            fh,
            indent=1,
        )
        fh.write("\n")

    return MetaDataset(
        rows=rows, labels=labels, provenance=[r["dataset"] for r in provenance_rows]
    )


def load_meta_csv(path) -> MetaDataset:
    """Read a labeled meta-dataset written by build_meta_dataset."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != META_CSV_HEADER:
            raise ValueError(
                f"{path}: expected header {','.join(META_CSV_HEADER)}, got {header}"
            )
        rows: list[MetaFeatureVector] = []
        labels: list[FSMethod] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(META_CSV_HEADER):
                raise ValueError(f"{path}: row {line_no} has {len(row)} cells")
            try:
                rows.append(MetaFeatureVector.from_array([float(v) for v in row[:6]]))
            except ValueError as exc:
                raise ValueError(f"{path}: row {line_no}: {exc}") from None
            labels.append(FSMethod(row[6]))
    if not rows:
        raise ValueError(f"{path}: no meta rows")
    return MetaDataset(rows=rows, labels=labels)


def evaluate_suite(
    model: RecommenderModel, dataset_paths: list, config: RunConfig,
    label_column: int | str = -1,
) -> EvaluationReport:
    """Compare ground-truth best methods against recommendations.

    Ground truth per dataset is the method with the highest weighted sum
    under the fold protocol; ties in the "attains the best score" counts
    credit every tied method. A failing dataset is recorded and skipped.
    """
    rows = []
    hits = 0
    best_counts = {m: 0 for m in METHOD_ORDER}
    recommended_counts = {m: 0 for m in METHOD_ORDER}
    for path in dataset_paths:
        path = Path(path)
        try:
            data = load_csv(path, label_column=label_column)
            table = best_method(
                data,
                k_folds=config.folds,
                seed=config.master_seed,
                ranker_params=config.ranker_params,
            )
            meta = extract_meta(data)
            label, sims = recommend(model, meta)
        except Exception as exc:  # noqa: BLE001 - one failure must not end the suite
            logger.warning("evaluation failed for %s: %s", path, exc)
            rows.append({"dataset": path.name, "error": f"{type(exc).__name__}: {exc}"})
            continue
        hit = label == table.best_method
        hits += int(hit)
        top = max(table.ws.values())
        for m in METHOD_ORDER:
            best_counts[m] += int(table.ws[m] == top)
        recommended_counts[label] += 1
        rows.append(
            {
                "dataset": path.name,
                "ws": {m.value: table.ws[m] for m in METHOD_ORDER},
                "best_method": table.best_method.value,
                "recommended": label.value,
                "similarities": {m.value: sims[m] for m in model.class_order},
                "hit": hit,
            }
        )
    return EvaluationReport(
        rows=rows,
        best_counts=best_counts,
        recommended_counts=recommended_counts,
        hits=hits,
        dataset_count=len(dataset_paths),
    )


def write_curves(
    curves: dict[FSMethod, EliminationCurve], out_dir
) -> dict[FSMethod, Path]:
    """One CSV per method: removed_count, mean_accuracy."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for method, curve in curves.items():
        path = out_dir / f"curve_{method.value}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["removed_count", "mean_accuracy"])
            for k, acc in enumerate(curve.mean_accuracy, start=1):
                writer.writerow([k, repr(float(acc))])
        paths[method] = path
    return paths


def report_curves(
    data: Dataset, out_dir, k_folds: int = 10, seed: int = 0,
    ranker_params: dict[FSMethod, dict] | None = None,
) -> tuple[MethodScoreTable, dict[FSMethod, Path]]:
    """Evaluate all four methods on one dataset and emit their curves."""
    table = best_method(data, k_folds=k_folds, seed=seed, ranker_params=ranker_params)
    return table, write_curves(table.curves, out_dir)
