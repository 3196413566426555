"""Hand-rolled differentiable layers, training loops and dataset windowing."""

from .scaling import LeakageError, ScalerPair, ScalingError, fit_scalers, window_dataset, WindowedDataset
from .layers import Conv1D, Dense, LSTM, MaxPool1D, conv1d_forward, lstm_forward, maxpool
from .models import build_model, mse_loss
from .training import TrainedForecaster, TrainError, predict_unscaled, train
from .gan import gan_train, gan_value
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Conv1D",
    "Dense",
    "LSTM",
    "LeakageError",
    "MaxPool1D",
    "ScalerPair",
    "ScalingError",
    "TrainError",
    "TrainedForecaster",
    "WindowedDataset",
    "build_model",
    "conv1d_forward",
    "fit_scalers",
    "gan_train",
    "gan_value",
    "load_checkpoint",
    "lstm_forward",
    "maxpool",
    "mse_loss",
    "predict_unscaled",
    "save_checkpoint",
    "train",
    "window_dataset",
]
