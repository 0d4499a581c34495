from .features import (
    FEATURES_PER_SEGMENT,
    N_FEATURES,
    channel_stats,
    frame_features,
    frames_to_features,
    sliding_windows,
)
from .gradients import batch_loss, compute_gradients
from .network import (
    PARAM_NAMES,
    WINDOW_FRAMES,
    ModelWeights,
    NonFiniteWeight,
    ShapeMismatch,
    batch_forward,
    conv1d_forward,
    dense_forward,
    init_weights,
    lstm_forward,
    lstm_step,
    normalize_window,
    predict_window,
)
from .regressor import AgrfRegressor
from .streaming import (
    InferenceState,
    StreamingEstimator,
    evaluate_sequence,
    measure_latency,
    predict_frame,
)
from .training import Diverged, TrainingConfig, train_reference
from .weights_io import (
    BadHeader,
    describe_weights,
    load_weights,
    load_weights_file,
    save_weights,
    save_weights_file,
)

__all__ = [
    "FEATURES_PER_SEGMENT",
    "N_FEATURES",
    "channel_stats",
    "frame_features",
    "frames_to_features",
    "sliding_windows",
    "batch_loss",
    "compute_gradients",
    "PARAM_NAMES",
    "WINDOW_FRAMES",
    "ModelWeights",
    "NonFiniteWeight",
    "ShapeMismatch",
    "batch_forward",
    "conv1d_forward",
    "dense_forward",
    "init_weights",
    "lstm_forward",
    "lstm_step",
    "normalize_window",
    "predict_window",
    "AgrfRegressor",
    "InferenceState",
    "StreamingEstimator",
    "evaluate_sequence",
    "measure_latency",
    "predict_frame",
    "Diverged",
    "TrainingConfig",
    "train_reference",
    "BadHeader",
    "describe_weights",
    "load_weights",
    "load_weights_file",
    "save_weights",
    "save_weights_file",
]
