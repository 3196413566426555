import numpy as np
import pytest

from test_scaling import feature_table
from topicforge.nn.checkpoint import load_checkpoint, save_checkpoint
from topicforge.nn.models import build_model, mse_loss
from topicforge.nn.scaling import ScalerPair, window_dataset
from topicforge.nn.training import TrainError, predict_unscaled, train


@pytest.fixture(scope="module")
def dataset():
    return window_dataset(feature_table(60, seed=40), lookback=4)


class TestMseLoss:
    def test_equals_per_sample_mean(self):
        rng = np.random.default_rng(41)
        yhat = rng.normal(size=50)
        y = rng.normal(size=50)
        loss, _ = mse_loss(yhat, y)
        manual = sum((a - b) ** 2 for a, b in zip(yhat, y)) / 50
        assert loss == pytest.approx(manual, abs=1e-12)

    def test_gradient_shape_and_scale(self):
        yhat = np.array([1.0, 2.0])
        y = np.array([0.0, 0.0])
        loss, dy = mse_loss(yhat, y)
        assert np.allclose(dy, [1.0, 2.0])  # 2 * diff / n


class TestTrain:
    def test_perfect_prediction_zero_loss_zero_grads(self, dataset):
        model = build_model("lstm", dataset.n_features, dataset.lookback, seed=1, hidden=4)
        target = model.forward(dataset.X_train)
        loss, dy = mse_loss(model.forward(dataset.X_train), target)
        assert loss == 0.0
        model.zero_grads()
        model.backward(dy)
        for name, g in model.grads.items():
            assert np.allclose(g, 0.0, atol=1e-15), name

    def test_loss_curve_finite_and_decreasing(self, dataset):
        fc = train("lstm", dataset, epochs=40, seed=2, hidden=8)
        assert all(np.isfinite(fc.loss_curve))
        assert fc.loss_curve[-1] < fc.loss_curve[0]

    def test_deterministic_bitwise(self, dataset):
        a = train("cnn", dataset, epochs=15, seed=3, filters=4, dense_units=4)
        b = train("cnn", dataset, epochs=15, seed=3, filters=4, dense_units=4)
        for name in a.params:
            assert np.array_equal(a.params[name], b.params[name]), name
        assert np.array_equal(a.predictions["test"], b.predictions["test"])
        assert a.loss_curve == b.loss_curve

    def test_non_finite_loss_aborts_with_epoch(self, dataset):
        bad = window_dataset(feature_table(60, seed=40), lookback=4)
        bad.X_train[0, 0, 0] = np.nan
        with pytest.raises(TrainError, match="epoch 0"):
            train("lstm", bad, epochs=5, seed=0, hidden=4)

    def test_empty_training_set_rejected(self, dataset):
        import dataclasses

        empty = dataclasses.replace(dataset, X_train=dataset.X_train[:0], y_train=dataset.y_train[:0])
        with pytest.raises(TrainError, match="empty"):
            train("lstm", empty, epochs=1, seed=0)


class TestPredictUnscaled:
    def test_round_trip(self, dataset):
        y = np.linspace(0.0, 1.0, 7)
        prices = dataset.scalers.inverse_target(y)
        assert np.allclose(dataset.scalers.transform_target(prices), y, atol=1e-12)

    def test_constant_half_maps_to_midpoint(self):
        scalers = ScalerPair(
            target_min=100.0,
            target_max=200.0,
            feature_names=("adj_close",),
            feature_min=np.array([100.0]),
            feature_max=np.array([200.0]),
        )

        class Constant:
            def forward(self, x):
                return np.full(x.shape[0], 0.5)

        out = predict_unscaled(Constant(), np.zeros((3, 2, 1)), scalers)
        assert np.allclose(out, 150.0)

    def test_pipeline_matches_manual_two_step(self, dataset):
        fc = train("lstm", dataset, epochs=5, seed=5, hidden=4)
        manual = dataset.scalers.inverse_target(fc.model.forward(dataset.X_test))
        assert np.allclose(fc.predictions["test"], manual, atol=1e-12)


class TestCheckpoint:
    def test_round_trip_bit_identical(self, dataset, tmp_path):
        fc = train("cnn_lstm", dataset, epochs=8, seed=6, hidden=4, filters=3)
        p = tmp_path / "model.tfc1"
        save_checkpoint(fc, p, extra={"hidden": 4})
        again = load_checkpoint(p)
        assert again.tag == "cnn_lstm"
        for name in fc.params:
            assert np.array_equal(fc.params[name], again.params[name]), name
        assert np.array_equal(
            again.model.forward(dataset.X_test), fc.model.forward(dataset.X_test)
        )
        assert again.scalers.target_min == fc.scalers.target_min
        assert again.feature_names == fc.feature_names

    def test_bad_magic_rejected(self, tmp_path):
        p = tmp_path / "bad.tfc1"
        p.write_bytes(b"XXXX" + b"\x00" * 32)
        from topicforge.nn.checkpoint import CheckpointError

        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(p)
