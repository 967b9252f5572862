"""Acceptance suite.

One test per acceptance criterion, each asserting its stated tolerance and
printing a PASS line (run with `pytest -v -s tests/test_acceptance.py` to
see the lines as they happen). The desk-scale end-to-end run uses 100
synthetic datasets with samples-per-cluster capped at 30 and is executed
twice to prove determinism.
"""

import time

import numpy as np
import pytest

from fsmeta.core_data import load_csv, save_csv
from fsmeta.evaluator import (
    best_method,
    curve_for_ranker,
    train_logistic,
    weighted_sum,
)
from fsmeta.evaluator import _loss_and_grad, _loss_only
from fsmeta.fs_rankers import METHOD_ORDER, FeatureRanking, FSMethod, rank
from fsmeta.fuzzy_recommender import (
    MetaDataset,
    recommend,
    similarity,
    train_recommender,
)
from fsmeta.meta_features import (
    MetaFeatureVector,
    compute_aaf,
    compute_acf,
    compute_acvf,
    compute_aef,
    extract_meta,
)
from fsmeta.pipeline import RunConfig, build_meta_dataset, load_meta_csv
from fsmeta.fuzzy_recommender import save_model
from fsmeta.synthesizer import SynthParams, sample_params, synthesize

from conftest import make_label_copy_dataset, random_dataset
from test_meta_features import naive_aaf, naive_acf, naive_acvf, naive_aef


def report(criterion: str, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS ({detail})")


DESK_SCALE = dict(count=100, master_seed=7, folds=5, jobs=2, p6_max=30)


def desk_build(out_dir):
    config = RunConfig(out_dir=out_dir, **DESK_SCALE)
    started = time.perf_counter()
    meta = build_meta_dataset(config)
    return meta, time.perf_counter() - started


def user_csvs(out_dir):
    """Three unseen datasets of assorted shapes, written as plain CSVs."""
    shapes = [
        SynthParams(p2_useful=4, p3_redundant=2, p4_repeated=1, p5_useless=1,
                    p6_samples_per_cluster=64, p7_clusters_per_class=3,
                    p8_seed=901, p9_hypercube_factor=3, p10_flip_fraction=0.05,
                    p11_permute=1),
        SynthParams(p2_useful=6, p3_redundant=4, p4_repeated=2, p5_useless=8,
                    p6_samples_per_cluster=15, p7_clusters_per_class=2,
                    p8_seed=902, p9_hypercube_factor=6, p10_flip_fraction=0.02,
                    p11_permute=0),
        SynthParams(p2_useful=12, p3_redundant=10, p4_repeated=8, p5_useless=20,
                    p6_samples_per_cluster=25, p7_clusters_per_class=2,
                    p8_seed=903, p9_hypercube_factor=2, p10_flip_fraction=0.10,
                    p11_permute=1),
    ]
    paths = []
    for i, params in enumerate(shapes):
        data, _ = synthesize(params)
        path = out_dir / f"user_{i}.csv"
        save_csv(data, path)
        paths.append(path)
    return paths


@pytest.fixture(scope="module")
def desk_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk_run")
    meta, elapsed = desk_build(out)
    model = train_recommender(meta)
    return out, meta, model, elapsed


def test_criterion_1_meta_feature_oracle_equivalence():
    rng = np.random.default_rng(101)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        s = int(rng.integers(4, 51))
        n = int(rng.integers(1, 11))
        ds = random_dataset(rng, s, n)
        for got, naive in (
            (compute_aaf(ds), naive_aaf(ds.values)),
            (compute_acf(ds), naive_acf(ds.values)),
            (compute_acvf(ds), naive_acvf(ds.values)),
            (compute_aef(ds), naive_aef(ds.values)),
        ):
            worst = max(worst, abs(got - naive))
            assert abs(got - naive) < 1e-9
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report("1 meta-feature oracle equivalence",
           f"100 datasets, max |diff| {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_similarity_algebra():
    rng = np.random.default_rng(202)
    started = time.perf_counter()
    ys = rng.uniform(size=(10_000, 6))
    vs = rng.uniform(size=(10_000, 6))
    for y, v in zip(ys, vs):
        s = similarity(y, v)
        assert 0.0 <= s <= 1.0
        assert s == similarity(v, y)
        assert similarity(y, y) == 1.0
    hand = similarity(np.full(6, 0.6), np.full(6, 0.8))
    assert abs(hand - 0.84853) < 1e-5
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report("2 similarity algebra",
           f"10k fuzzed pairs, hand value {hand:.6f}, {elapsed:.2f}s")


def test_criterion_3_ws_discrimination():
    started = time.perf_counter()
    n = 10
    correct = FeatureRanking(order=np.arange(n), scores=np.arange(n, 0, -1.0),
                             method=FSMethod.GIFS)
    reversed_ = FeatureRanking(order=np.arange(n)[::-1].copy(),
                               scores=np.arange(n, dtype=float),
                               method=FSMethod.GIFS)
    wins = 0
    for seed in range(20):
        ds = make_label_copy_dataset(seed, s=200, n_noise=9)
        ws_good = weighted_sum(curve_for_ranker(ds, lambda d: correct,
                                                k_folds=10, seed=seed))
        ws_bad = weighted_sum(curve_for_ranker(ds, lambda d: reversed_,
                                               k_folds=10, seed=seed))
        wins += int(ws_good > ws_bad)
    elapsed = time.perf_counter() - started
    assert wins >= 19
    assert elapsed < 60.0
    report("3 WS discrimination", f"{wins}/20 seeds, {elapsed:.1f}s")


def test_criterion_4_synthesizer_structure():
    started = time.perf_counter()
    for seed in range(50):
        params = sample_params(seed)
        data, manifest = synthesize(params)
        assert data.n_samples == 2 * params.p6_samples_per_cluster * \
            params.p7_clusters_per_class
        assert len(manifest.flipped_indices) == params.flip_count
        pre = manifest.unpermuted_values(data)
        block = pre[:, : params.p2_useful + params.p3_redundant]
        assert np.linalg.matrix_rank(block) == params.p2_useful
        first_repeated = params.p2_useful + params.p3_redundant
        for i, src in enumerate(manifest.repeated_sources):
            assert np.array_equal(pre[:, first_repeated + i], pre[:, src])
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    report("4 synthesizer structure", f"50 datasets, {elapsed:.1f}s")


def test_criterion_5_ranker_sanity():
    started = time.perf_counter()
    hits = {method: 0 for method in METHOD_ORDER}
    for seed in range(20):
        ds = make_label_copy_dataset(seed, s=200, n_noise=9)
        for method in METHOD_ORDER:
            ranking = rank(ds, method)
            if 0 in ranking.order[:2]:
                hits[method] += 1
    elapsed = time.perf_counter() - started
    for method, count in hits.items():
        assert count >= 19, f"{method}: {count}/20"
    assert elapsed < 60.0
    report("5 ranker sanity",
           f"{ {m.value: c for m, c in hits.items()} }, {elapsed:.1f}s")


def test_criterion_6_logistic_regression():
    x = np.array([[-2.0, -1.5], [-1.0, -2.0], [1.0, 1.5], [2.0, 1.0]])
    y = np.array([0, 0, 1, 1])
    model = train_logistic(x, y)
    assert model.accuracy(x, y) == 1.0

    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(20):
        s = int(rng.integers(5, 30))
        n = int(rng.integers(1, 6))
        xs = rng.standard_normal((s, n))
        ys = rng.integers(0, 2, s).astype(float)
        w = rng.standard_normal(n)
        b = float(rng.standard_normal())
        l2 = float(rng.uniform(0, 0.1))
        _, grad_w, grad_b = _loss_and_grad(xs, ys, w, b, l2)
        eps = 1e-6
        for j in range(n):
            delta = np.zeros(n)
            delta[j] = eps
            num = (_loss_only(xs, ys, w + delta, b, l2)
                   - _loss_only(xs, ys, w - delta, b, l2)) / (2 * eps)
            rel = abs(num - grad_w[j]) / max(1.0, abs(num))
            worst = max(worst, rel)
            assert rel <= 1e-5
        num_b = (_loss_only(xs, ys, w, b + eps, l2)
                 - _loss_only(xs, ys, w, b - eps, l2)) / (2 * eps)
        assert abs(num_b - grad_b) / max(1.0, abs(num_b)) <= 1e-5
    report("6 logistic regression",
           f"separable acc 1.0, max grad rel err {worst:.2e}")


def test_criterion_7_end_to_end_desk_scale(desk_run, tmp_path):
    out1, meta1, model1, elapsed1 = desk_run
    assert elapsed1 < 1200.0, f"first execution took {elapsed1:.0f}s"

    loaded = load_meta_csv(out1 / "meta.csv")
    assert len(loaded.rows) == 100
    assert len(set(loaded.labels)) >= 2

    # second execution from scratch: byte-identical artifacts
    out2 = tmp_path / "second"
    meta2, elapsed2 = desk_build(out2)
    assert elapsed2 < 1200.0, f"second execution took {elapsed2:.0f}s"
    assert (out1 / "meta.csv").read_bytes() == (out2 / "meta.csv").read_bytes()

    model2 = train_recommender(meta2)
    save_model(model1, out1 / "model.json")
    save_model(model2, out2 / "model.json")
    assert (out1 / "model.json").read_bytes() == (out2 / "model.json").read_bytes()

    recs = []
    for run_dir, model in ((out1, model1), (out2, model2)):
        run_recs = []
        for path in user_csvs(run_dir):
            data = load_csv(path)
            label, sims = recommend(model, extract_meta(data))
            assert label in model.class_order
            run_recs.append((path.name, label.value))
        recs.append(run_recs)
    assert recs[0] == recs[1]
    report("7 end-to-end desk scale",
           f"100 rows, labels {sorted({l.value for l in loaded.labels})}, "
           f"runs {elapsed1:.0f}s/{elapsed2:.0f}s, recs {recs[0]}")


def test_criterion_8_recommender_separation():
    rng = np.random.default_rng(808)
    rows, labels = [], []
    for i, method in enumerate(METHOD_ORDER):
        for _ in range(6):
            jitter = rng.uniform(-0.03, 0.03, 6)
            base = np.array([200 * (i + 1), 15 * (i + 1), i - 1.5,
                             0.22 * i - 0.3, 1.5 * i, 0.6 * i])
            rows.append(MetaFeatureVector.from_array(base + jitter * base.clip(1)))
            labels.append(method)
    meta = MetaDataset(rows=rows, labels=labels)
    model = train_recommender(meta)
    for row, label in zip(rows, labels):
        got, _ = recommend(model, row)
        assert got is label
    report("8 recommender separation", "24/24 resubstitution hits")


def test_criterion_9_recommendation_overhead(desk_run):
    _, _, model, _ = desk_run
    pima_shaped = SynthParams(
        p2_useful=4, p3_redundant=2, p4_repeated=1, p5_useless=1,
        p6_samples_per_cluster=64, p7_clusters_per_class=3, p8_seed=55,
        p9_hypercube_factor=3, p10_flip_fraction=0.05, p11_permute=1,
    )
    data, _ = synthesize(pima_shaped)  # 384 x 8, PIMA-like width

    started = time.perf_counter()
    label, _ = recommend(model, extract_meta(data))
    meta_time = time.perf_counter() - started

    started = time.perf_counter()
    best_method(data, k_folds=10, seed=9)
    full_time = time.perf_counter() - started

    ratio = meta_time / full_time
    assert ratio < 0.10
    report("9 recommendation overhead",
           f"{meta_time * 1e3:.1f}ms vs {full_time:.2f}s, ratio {ratio:.4f}")
