"""scikit-learn estimator facade over the from-scratch network.

AgrfRegressor exposes the trainer and forward pass through the standard
fit/predict/get_params surface so the model slots into sklearn pipelines,
grid search, and cross-validation. X is the 3D window tensor
(n_windows, 6, channels); y is AGRF in body weights.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from ..validation import check_targets, check_windows
from . import network
from .network import WINDOW_FRAMES, batch_forward
from .training import TrainingConfig, train_reference


class AgrfRegressor(RegressorMixin, BaseEstimator):
    """Sliding-window CNN-LSTM regressor for anterior ground reaction force.

    Parameters mirror TrainingConfig; after fit the learned weights are in
    ``weights_`` and the per-epoch training loss in ``loss_trace_``.
    """

    def __init__(
        self,
        conv_filters=network.DEFAULT_CONV_FILTERS,
        kernel_size=network.DEFAULT_KERNEL_SIZE,
        lstm_hidden=network.DEFAULT_LSTM_HIDDEN,
        dense1_units=network.DEFAULT_DENSE1_UNITS,
        dropout_rate=network.DEFAULT_DROPOUT_RATE,
        learning_rate=0.1,
        epochs=60,
        batch_size=256,
        seed=0,
    ):
        self.conv_filters = conv_filters
        self.kernel_size = kernel_size
        self.lstm_hidden = lstm_hidden
        self.dense1_units = dense1_units
        self.dropout_rate = dropout_rate
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, X, y):
        X = check_windows(X, WINDOW_FRAMES)
        y = check_targets(y, X.shape[0])
        config = TrainingConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
            conv_filters=self.conv_filters,
            kernel_size=self.kernel_size,
            lstm_hidden=self.lstm_hidden,
            dense1_units=self.dense1_units,
            dropout_rate=self.dropout_rate,
        )
        self.weights_, self.loss_trace_ = train_reference(X, y, config)
        self.n_features_in_ = X.shape[2]
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "weights_"):
            raise AttributeError("AgrfRegressor must be fitted before predict")
        X = check_windows(X, WINDOW_FRAMES, channels=self.weights_.input_channels)
        return batch_forward(X, self.weights_)
