from datetime import date, timedelta

import numpy as np
import pytest

from topicforge.indicators import FEATURE_COLUMNS, FeatureTable
from topicforge.nn.scaling import (
    LeakageError,
    ScalingError,
    fit_scalers,
    variant_columns,
    window_dataset,
)


def feature_table(n_rows, seed=0):
    rng = np.random.default_rng(seed)
    dates = [date(2021, 1, 4) + timedelta(days=i) for i in range(n_rows)]
    cols = {name: rng.uniform(10, 200, n_rows) for name in FEATURE_COLUMNS}
    return FeatureTable(dates=dates, columns=cols, warmup_dropped=0)


class TestFitScalers:
    def test_midpoint(self):
        m = np.array([[0.0], [10.0]])
        s = fit_scalers(m, ("adj_close",), 0)
        assert s.transform_features(np.array([[5.0]]))[0, 0] == 0.5

    def test_extremes_map_to_unit_interval(self):
        rng = np.random.default_rng(1)
        m = rng.uniform(-50, 50, (30, 3))
        s = fit_scalers(m, ("a", "adj_close", "c"), 1)
        t = s.transform_features(m)
        assert np.allclose(t.min(axis=0), 0.0, atol=1e-12)
        assert np.allclose(t.max(axis=0), 1.0, atol=1e-12)

    def test_inverse_round_trip(self):
        rng = np.random.default_rng(2)
        m = rng.uniform(-50, 50, (30, 2))
        s = fit_scalers(m, ("adj_close", "x"), 0)
        y = rng.uniform(-50, 50, 100)
        assert np.allclose(s.inverse_target(s.transform_target(y)), y, atol=1e-12)

    def test_constant_column_named(self):
        m = np.column_stack([np.ones(10), np.arange(10.0)])
        with pytest.raises(ScalingError, match="frozen_col"):
            fit_scalers(m, ("frozen_col", "adj_close"), 1)


class TestWindowDataset:
    def test_sample_count_lookback_one(self):
        table = feature_table(25)
        ds = window_dataset(table, lookback=1)
        assert ds.X_train.shape[0] + ds.X_test.shape[0] == 24
        assert ds.X_test.shape[0] == 20

    def test_both_flags_sixteen_columns(self):
        table = feature_table(40)
        rng = np.random.default_rng(8)
        score = {d: float(v) for d, v in zip(table.dates, rng.uniform(-1, 1, 40))}
        topic = {d: float(v) for d, v in zip(table.dates, rng.uniform(-1, 1, 40))}
        ds = window_dataset(table, lookback=2, with_score=True, with_topic_score=True, score=score, topic_score=topic)
        assert len(ds.feature_names) == 16
        assert ds.feature_names == variant_columns(True, True)

    def test_x_rows_verbatim(self):
        table = feature_table(30, seed=3)
        ds = window_dataset(table, lookback=3)
        matrix = np.column_stack([table.columns[c] for c in ds.feature_names])
        scaled = ds.scalers.transform_features(matrix)
        # sample 0 covers rows [0, 1, 2] and targets row 3
        assert np.allclose(ds.X_train[0], scaled[0:3], atol=1e-12)
        assert ds.y_train[0] == pytest.approx(
            ds.scalers.transform_target(matrix[3, ds.feature_names.index("adj_close")]), abs=1e-12
        )

    def test_insufficient_rows(self):
        with pytest.raises(ScalingError, match="need >="):
            window_dataset(feature_table(20), lookback=5)

    def test_test_split_is_last_twenty_targets(self):
        table = feature_table(40, seed=4)
        ds = window_dataset(table, lookback=2)
        assert ds.test_dates == table.dates[-20:]
        matrix = np.column_stack([table.columns[c] for c in ds.feature_names])
        target_col = ds.feature_names.index("adj_close")
        expect = ds.scalers.transform_target(matrix[-20:, target_col])
        assert np.allclose(ds.y_test, expect, atol=1e-12)


class TestLeakageGuard:
    def test_full_fit_scalers_differ_and_are_rejected(self):
        table = feature_table(40, seed=5)
        names = variant_columns(False, False)
        matrix = np.column_stack([table.columns[c] for c in names])
        full_fit = fit_scalers(matrix, names, names.index("adj_close"))
        train_fit = fit_scalers(matrix[:-20], names, names.index("adj_close"))
        assert not np.array_equal(full_fit.feature_min, train_fit.feature_min) or not np.array_equal(
            full_fit.feature_max, train_fit.feature_max
        )
        with pytest.raises(LeakageError):
            window_dataset(table, lookback=2, scalers=full_fit)

    def test_train_only_fit_accepted(self):
        table = feature_table(40, seed=6)
        names = variant_columns(False, False)
        matrix = np.column_stack([table.columns[c] for c in names])
        train_fit = fit_scalers(matrix[:-20], names, names.index("adj_close"))
        ds = window_dataset(table, lookback=2, scalers=train_fit)
        assert ds.scalers is train_fit

    def test_no_test_rows_in_train_windows(self):
        table = feature_table(40, seed=7)
        ds = window_dataset(table, lookback=3)
        # the last train window ends before the first test target row
        matrix = np.column_stack([table.columns[c] for c in ds.feature_names])
        scaled = ds.scalers.transform_features(matrix)
        first_test_row = len(table) - 20
        assert np.allclose(ds.X_train[-1], scaled[first_test_row - 4 : first_test_row - 1], atol=1e-12)
