import numpy as np
import pytest

from gaitfeedback.core import N_SEGMENTS, KinematicFrame


def random_frame(rng: np.random.Generator, timestamp_us: int) -> KinematicFrame:
    """A structurally valid frame with unit quaternions and bounded channels."""
    quat = rng.normal(size=(N_SEGMENTS, 4))
    quat /= np.linalg.norm(quat, axis=1, keepdims=True)
    return KinematicFrame(
        timestamp_us=timestamp_us,
        quat=quat.astype(np.float32),
        free_accel=rng.normal(0, 2, size=(N_SEGMENTS, 3)).astype(np.float32),
        ang_vel=rng.normal(0, 1, size=(N_SEGMENTS, 3)).astype(np.float32),
        position=rng.normal(0, 1, size=(N_SEGMENTS, 3)).astype(np.float32),
    )


def frame_stream(rng: np.random.Generator, n: int, start_us: int = 0, dt_us: int = 20_000):
    return [random_frame(rng, start_us + i * dt_us) for i in range(n)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
