"""Real-time overground gait biofeedback engine.

Subpackages:
    core       domain types, body-weight normalization, ingest wire format
    estimator  from-scratch CNN-LSTM AGRF estimator, trainer, weight files
    gaitevents foot-contact / swing-initiation detection and stance segmentation
    feedback   threshold calibration, faded scheduling, trigger decisions
    haptics    armband wire protocol, UDP sender, device emulator
    session    protocol state machine, pipeline runner, logging, control channel
    metrics    per-stance biomechanics, statistics battery, reports
    synthgait  deterministic synthetic hemiparetic-gait oracle
"""

__version__ = "0.1.0"
