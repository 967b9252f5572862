import math

import numpy as np
import pytest

from fsmeta.core_data import (
    UNIT_EPS,
    Dataset,
    apply_zscore,
    apply_zscore_unit,
    fit_zscore,
    load_csv,
    save_csv,
    stratified_kfold,
)

from conftest import random_dataset


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_string_labels_map_by_textual_sort(self, tmp_path):
        f = write(tmp_path / "d.csv", "1,2,a\n3,4,b\n5,6,a\n")
        ds = load_csv(f)
        assert ds.n_samples == 3 and ds.n_features == 2
        assert ds.labels.tolist() == [0, 1, 0]
        assert ds.feature_names is None

    def test_non_binary_labels_rejected(self, tmp_path):
        f = write(tmp_path / "d.csv", "1,a\n2,b\n3,c\n")
        with pytest.raises(ValueError, match="non-binary"):
            load_csv(f)

    def test_single_label_value_rejected(self, tmp_path):
        f = write(tmp_path / "d.csv", "1,a\n2,a\n")
        with pytest.raises(ValueError, match="non-binary"):
            load_csv(f)

    def test_empty_file(self, tmp_path):
        f = write(tmp_path / "d.csv", "")
        with pytest.raises(ValueError, match="empty"):
            load_csv(f)

    def test_parse_error_reports_position(self, tmp_path):
        f = write(tmp_path / "d.csv", "1,2,0\n3,oops,1\n5,6,0\n")
        with pytest.raises(ValueError, match="row 2, column 2"):
            load_csv(f)

    def test_non_finite_rejected(self, tmp_path):
        f = write(tmp_path / "d.csv", "1,2,0\nnan,4,1\n")
        with pytest.raises(ValueError, match="non-finite"):
            load_csv(f)

    def test_header_detected_and_names_kept(self, tmp_path):
        f = write(tmp_path / "d.csv", "alpha,beta,label\n1,2,0\n3,4,1\n")
        ds = load_csv(f)
        assert ds.feature_names == ["alpha", "beta"]
        assert ds.labels.tolist() == [0, 1]

    def test_label_column_by_name(self, tmp_path):
        f = write(tmp_path / "d.csv", "target,x\n0,1.5\n1,2.5\n")
        ds = load_csv(f, label_column="target")
        assert ds.values[:, 0].tolist() == [1.5, 2.5]
        assert ds.feature_names == ["x"]

    def test_label_column_by_index(self, tmp_path):
        f = write(tmp_path / "d.csv", "0,1.5\n1,2.5\n")
        ds = load_csv(f, label_column=0)
        assert ds.values[:, 0].tolist() == [1.5, 2.5]

    def test_roundtrip_exact(self, tmp_path, rng):
        ds = random_dataset(rng, 23, 7)
        save_csv(ds, tmp_path / "d.csv")
        back = load_csv(tmp_path / "d.csv")
        assert np.max(np.abs(back.values - ds.values)) < 1e-12
        assert back.labels.tolist() == ds.labels.tolist()

    def test_roundtrip_with_header(self, tmp_path, rng):
        ds = Dataset(rng.standard_normal((5, 2)), [0, 1, 0, 1, 0], ["a", "b"])
        save_csv(ds, tmp_path / "d.csv")
        back = load_csv(tmp_path / "d.csv")
        assert back.feature_names == ["a", "b"]
        assert np.array_equal(back.values, ds.values)


class TestDatasetInvariants:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="NaN"):
            Dataset(np.array([[1.0], [np.nan]]), [0, 1])

    def test_rejects_mismatched_labels(self):
        with pytest.raises(ValueError, match="label count"):
            Dataset(np.ones((3, 2)), [0, 1])

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError, match="labels"):
            Dataset(np.ones((2, 1)), [0, 2])

    def test_values_read_only(self):
        ds = Dataset(np.ones((2, 1)), [0, 1])
        with pytest.raises(ValueError):
            ds.values[0, 0] = 5.0


class TestZscore:
    def test_textbook_values(self):
        stats = fit_zscore(np.array([[1.0], [2.0], [3.0]]))
        assert stats.means[0] == 2.0
        assert stats.stds[0] == 1.0

    def test_constant_column_std_one(self):
        stats = fit_zscore(np.array([[5.0], [5.0], [5.0]]))
        assert stats.means[0] == 5.0
        assert stats.stds[0] == 1.0

    def test_sample_std(self):
        stats = fit_zscore(np.array([[1.0], [2.0], [3.0], [10.0]]))
        assert stats.means[0] == 4.0
        assert abs(stats.stds[0] - math.sqrt(50.0 / 3.0)) < 1e-12

    def test_empty_rows_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            fit_zscore(np.ones((3, 1)), rows=[])

    def test_training_rows_standardized(self, rng):
        values = rng.normal(3.0, 2.5, size=(40, 5))
        rows = np.arange(25)
        stats = fit_zscore(values, rows)
        z = apply_zscore(values[rows], stats)
        assert np.max(np.abs(z.mean(axis=0))) < 1e-9
        assert np.max(np.abs(z.std(axis=0, ddof=1) - 1.0)) < 1e-9

    def test_dimension_mismatch(self):
        stats = fit_zscore(np.ones((3, 2)))
        with pytest.raises(ValueError, match="column count"):
            apply_zscore(np.ones((4, 3)), stats)


class TestUnitInterval:
    def test_train_extremes(self):
        values = np.array([[1.0], [2.0], [9.0]])
        stats = fit_zscore(values)
        unit = apply_zscore_unit(values, stats)
        assert unit[0, 0] == UNIT_EPS  # train min clamps up from 0
        assert unit[2, 0] == 1.0

    def test_beyond_training_range_clamps(self):
        stats = fit_zscore(np.array([[0.0], [10.0]]))
        assert apply_zscore_unit(np.array([11.0]), stats)[0] == 1.0
        assert apply_zscore_unit(np.array([-5.0]), stats)[0] == UNIT_EPS

    def test_always_inside_interval(self, rng):
        for _ in range(50):
            train = rng.normal(size=(12, 4)) * rng.uniform(0.1, 10)
            stats = fit_zscore(train)
            queries = rng.normal(size=(30, 4)) * 20
            unit = apply_zscore_unit(queries, stats)
            assert np.all(unit >= UNIT_EPS) and np.all(unit <= 1.0)

    def test_constant_feature_maps_to_floor(self):
        stats = fit_zscore(np.full((4, 1), 3.0))
        unit = apply_zscore_unit(np.array([[3.0], [7.0]]), stats)
        assert unit[0, 0] == UNIT_EPS


class TestStratifiedKfold:
    def test_exact_divisibility(self):
        ds = Dataset(np.arange(20, dtype=float).reshape(10, 2),
                     [0, 1, 0, 1, 0, 1, 0, 1, 0, 1])
        splits = stratified_kfold(ds, 5, seed=7)
        for split in splits:
            labels = ds.labels[split.test_indices]
            assert np.sum(labels == 0) == 1 and np.sum(labels == 1) == 1

    def test_k_capped_by_stratification(self):
        # k above the minority-class count collapses to it; a balanced
        # 10-sample dataset therefore yields 5 two-sample folds, not LOO.
        ds = Dataset(np.arange(20, dtype=float).reshape(10, 2),
                     [0, 1, 0, 1, 0, 1, 0, 1, 0, 1])
        splits = stratified_kfold(ds, 10, seed=7)
        assert len(splits) == 5
        for s in splits:
            assert ds.labels[s.test_indices].tolist().count(0) == 1
            assert ds.labels[s.test_indices].tolist().count(1) == 1

    def test_appendicitis_shape(self):
        # 106 samples split 85/21, 10 folds: minority test counts are 2 or 3.
        labels = np.array([0] * 85 + [1] * 21)
        ds = Dataset(np.arange(106, dtype=float).reshape(106, 1), labels)
        splits = stratified_kfold(ds, 10, seed=0)
        minority = [int(np.sum(ds.labels[s.test_indices])) for s in splits]
        assert set(minority) <= {2, 3}
        assert sum(minority) == 21

    def test_partition_property(self, rng):
        for trial in range(20):
            s = int(rng.integers(10, 60))
            labels = rng.integers(0, 2, s)
            labels[:4] = [0, 0, 1, 1]
            ds = Dataset(rng.standard_normal((s, 2)), labels)
            k = int(rng.integers(2, 6))
            splits = stratified_kfold(ds, k, seed=int(rng.integers(1000)))
            seen = np.concatenate([sp.test_indices for sp in splits])
            assert sorted(seen.tolist()) == list(range(s))
            for sp in splits:
                assert set(sp.train_indices) & set(sp.test_indices) == set()
                assert len(sp.train_indices) + len(sp.test_indices) == s

    def test_deterministic(self, rng):
        ds = random_dataset(rng, 30, 3)
        a = stratified_kfold(ds, 4, seed=11)
        b = stratified_kfold(ds, 4, seed=11)
        for x, y in zip(a, b):
            assert np.array_equal(x.test_indices, y.test_indices)

    def test_k_lowered_to_minority_count(self):
        labels = np.array([0] * 17 + [1] * 3)
        ds = Dataset(np.arange(20, dtype=float).reshape(20, 1), labels)
        splits = stratified_kfold(ds, 10, seed=0)
        assert len(splits) == 3

    def test_tiny_class_rejected(self):
        ds = Dataset(np.arange(6, dtype=float).reshape(6, 1), [0, 0, 0, 0, 0, 1])
        with pytest.raises(ValueError, match="each class"):
            stratified_kfold(ds, 2, seed=0)

    def test_k_below_two_rejected(self):
        ds = Dataset(np.arange(8, dtype=float).reshape(4, 2), [0, 1, 0, 1])
        with pytest.raises(ValueError, match="k must be"):
            stratified_kfold(ds, 1, seed=0)
