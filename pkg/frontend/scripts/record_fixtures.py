#!/usr/bin/env python3
"""Record console test fixtures from real engine runs.

Produces, under frontend/tests/fixtures/:

  bout_window_telemetry.jsonl
      Telemetry messages (one JSON object per line, exactly as the engine's
      websocket would send them) from a session driven with the reference
      estimator, sliced to the window around the first feedback bout's
      opening active period: rest end -> calibration -> bout entry ->
      triggers. The session is aborted shortly after the window so the
      recording is honest end-to-end.

  responder_report.json
      `analyze --json`-shaped report records for a full simulated responder
      session (positive feedback response), for the review screen.

  short_session.sessionl
      A small genuine session log (aborted early) for review-parsing tests.

Run from the repository root:  python3 frontend/scripts/record_fixtures.py
"""

import json
import sys
from pathlib import Path

from gaitfeedback.estimator import (
    TrainingConfig,
    init_weights,
    load_weights_file,
    save_weights_file,
    train_reference,
)
from gaitfeedback.metrics import report_to_records
from gaitfeedback.session import SessionConfig, analyze_log, run_session
from gaitfeedback.synthgait import (
    GaitProfile,
    ResponseMode,
    ResponseModel,
    closed_loop,
    generate,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
CACHE = Path.home() / ".cache" / "gaitfeedback" / "reference.agrfw"

# Slice bounds: rest_1 ends at 300 s; bout_1's first active window is its
# opening 45 s. Abort at 352 s keeps the recording short but complete.
SLICE_START_US = 295_000_000
ABORT_AT_US = 352_000_000


def reference_weights():
    if CACHE.exists():
        return load_weights_file(CACHE)
    windows, targets = make_training_set_cached()
    weights, _ = train_reference(windows, targets, TrainingConfig())
    CACHE.parent.mkdir(parents=True, exist_ok=True)
    save_weights_file(CACHE, weights)
    return weights


def make_training_set_cached():
    from gaitfeedback.synthgait import make_training_set

    return make_training_set()


def record_bout_window(weights) -> None:
    frames, _truth = generate(GaitProfile(seed=77), ABORT_AT_US / 1e6 + 5.0)
    messages = []
    run_session(
        SessionConfig(participant="fixture"),
        iter(frames),
        weights,
        controls=[(ABORT_AT_US, {"cmd": "abort"})],
        telemetry=messages.append,
    )
    kept = [m for m in messages if SLICE_START_US <= m["t_us"] <= ABORT_AT_US]
    triggers = [m for m in kept if m["type"] == "trigger"]
    if len(triggers) < 3:
        raise SystemExit(
            f"fixture too quiet: only {len(triggers)} triggers in the slice"
        )
    out = FIXTURES / "bout_window_telemetry.jsonl"
    with out.open("w", encoding="utf-8") as fh:
        for m in kept:
            fh.write(json.dumps(m, sort_keys=True) + "\n")
    print(
        f"wrote {out.name}: {len(kept)} messages, {len(triggers)} triggers, "
        f"{out.stat().st_size / 1024:.0f} KiB"
    )


def record_responder_report(weights) -> None:
    profile = GaitProfile(seed=42)
    response = ResponseModel(ResponseMode.RESPONDER, baseline_peak_bw=profile.agrf_peak_bw)
    log = closed_loop(profile, response, weights)
    report = analyze_log(log)
    out = FIXTURES / "responder_report.json"
    out.write_text(json.dumps(report_to_records(report), indent=2, sort_keys=True) + "\n")
    print(f"wrote {out.name}: {out.stat().st_size / 1024:.1f} KiB")


def record_short_session() -> None:
    frames, _truth = generate(GaitProfile(seed=5), 12.0)
    log = run_session(
        SessionConfig(participant="short-demo"),
        iter(frames),
        init_weights(42),
        controls=[(10_000_000, {"cmd": "abort"})],
    )
    out = FIXTURES / "short_session.sessionl"
    out.write_bytes(log.to_bytes())
    print(f"wrote {out.name}: {out.stat().st_size / 1024:.1f} KiB")


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    weights = reference_weights()
    record_bout_window(weights)
    record_responder_report(weights)
    record_short_session()
    return 0


if __name__ == "__main__":
    sys.exit(main())
