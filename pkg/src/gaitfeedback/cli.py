"""Command-line entry points.

Verbs:
  serve                 live session: frames in, control/telemetry socket up
  replay FILE.gaitbin   deterministic offline run over a recorded ingest
  simulate              closed-loop run against a synthetic participant
  analyze FILE.sessionl outcome battery for a finished session log
  train --synthetic     train the estimator on the synthetic corpus
  weights inspect FILE  describe a serialized weights file
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Iterable, List, Optional

from . import __version__
from .core import KinematicFrame, load_gaitbin, read_csv
from .errors import GaitFeedbackError
from .estimator import (
    ModelWeights,
    TrainingConfig,
    describe_weights,
    load_weights_file,
    save_weights,
    save_weights_file,
    train_reference,
)
from .metrics import Condition, percent_change, render_text, report_to_records

DEFAULT_CACHE = Path.home() / ".cache" / "gaitfeedback" / "reference.agrfw"


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _resolve_weights(path: Optional[str]) -> ModelWeights:
    """Load weights from --weights, else the cache, else train once and cache."""
    if path is not None:
        return load_weights_file(path)
    if DEFAULT_CACHE.exists():
        return load_weights_file(DEFAULT_CACHE)
    print(
        f"no weights given; training the reference estimator once "
        f"(cached at {DEFAULT_CACHE})",
        file=sys.stderr,
    )
    from .synthgait import make_training_set

    windows, targets = make_training_set()
    weights, _ = train_reference(windows, targets, TrainingConfig())
    DEFAULT_CACHE.parent.mkdir(parents=True, exist_ok=True)
    save_weights_file(DEFAULT_CACHE, weights)
    return weights


def _open_ingest(source: str) -> Iterable[KinematicFrame]:
    if source == "-":
        return read_csv(sys.stdin)
    path = Path(source)
    if path.suffix == ".gaitbin":
        return load_gaitbin(path)
    if path.suffix == ".csv":
        return read_csv(path.open("r"))
    raise GaitFeedbackError(
        f"unsupported ingest {source!r}: expected '-', .gaitbin, or .csv"
    )


def _make_sink(device: str):
    if device == "none":
        return None
    if device == "emulated":
        from .haptics import DirectDeviceLink

        return DirectDeviceLink()
    host, _, port = device.rpartition(":")
    if not host or not port.isdigit():
        raise GaitFeedbackError(
            f"unsupported device {device!r}: expected 'emulated', 'none', or HOST:PORT"
        )
    from .haptics import UdpCommandSender

    return UdpCommandSender(host=host, port=int(port))


def _save_log(log, out: Optional[str]) -> None:
    if out is None:
        return
    from .session import save_log

    save_log(out, log)
    print(f"log written to {out} ({len(log)} records)")


def _print_session_summary(log) -> None:
    stages = log.of_kind("stage")
    outcomes = log.of_kind("outcome")
    triggers = log.of_kind("trigger")
    aborted = any(r.get("abort") for r in stages)
    span_s = (stages[-1]["t_us"] - stages[0]["t_us"]) / 1e6 if stages else 0.0
    print(
        f"session {'aborted' if aborted else 'complete'}: "
        f"{span_s:.1f} s, {len(stages)} stage entries, "
        f"{len(outcomes)} stances, {len(triggers)} haptic triggers"
    )


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    from .session import ControlServer, IngestLost, SessionConfig, run_session

    weights = _resolve_weights(args.weights)
    config = SessionConfig(participant=args.participant, don_device_s=args.don_seconds)
    sink = _make_sink(args.device)
    frames = _open_ingest(args.ingest)
    with ControlServer(args.host, args.port) as server:
        host, port = server.address
        print(f"control/telemetry socket at ws://{host}:{port}", flush=True)
        try:
            log = run_session(
                config,
                frames,
                weights,
                sink=sink,
                control_queue=server.control_queue,
                telemetry=server.broadcast,
            )
        except IngestLost as err:
            print(f"ingest lost: {err}", file=sys.stderr)
            if err.log is not None:
                _save_log(err.log, args.out)
            return 1
    _print_session_summary(log)
    _save_log(log, args.out)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    from .session import IngestLost, SessionConfig, run_session

    weights = _resolve_weights(args.weights)
    config = SessionConfig(participant=args.participant, don_device_s=args.don_seconds)
    frames = _open_ingest(args.ingest)
    try:
        log = run_session(config, frames, weights, sink=_make_sink(args.device))
    except IngestLost as err:
        print(f"ingest lost: {err}", file=sys.stderr)
        if err.log is not None:
            _save_log(err.log, args.out)
        return 1
    _print_session_summary(log)
    _save_log(log, args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    from .session import SessionConfig, session_aggregates, session_triggers
    from .synthgait import GaitProfile, ResponseMode, ResponseModel, closed_loop

    weights = _resolve_weights(args.weights)
    profile = GaitProfile(seed=args.seed)
    model = ResponseModel(
        ResponseMode(args.profile), baseline_peak_bw=profile.agrf_peak_bw
    )
    config = SessionConfig(participant=f"synthetic-{args.profile}-seed{args.seed}")
    log = closed_loop(profile, model, weights, config)
    _print_session_summary(log)

    aggregates = session_aggregates(log)
    baseline = aggregates[Condition.BASELINE].peak_agrf_mean_bw
    print("condition means (peak propulsion, body weights):")
    for condition in Condition:
        agg = aggregates[condition]
        try:
            change = f"{percent_change(baseline, agg.peak_agrf_mean_bw):+7.2f} %"
        except GaitFeedbackError:  # pragma: no cover - baseline is never 0 here
            change = "     n/a"
        print(
            f"  {condition.value:>16}: {agg.peak_agrf_mean_bw:.4f} BW "
            f"(n={agg.n_stances:4d})  vs baseline {change}"
        )
    triggers = session_triggers(log)
    print(
        f"triggers: total {triggers.total_triggers}, "
        f"time to first {triggers.time_to_first_s} s, "
        f"longest run {triggers.max_consecutive}"
    )
    _save_log(log, args.out)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    from .session import analyze_log, load_log

    log = load_log(args.log)
    report = analyze_log(log)
    if args.json:
        json.dump(report_to_records(report), sys.stdout, indent=2, sort_keys=True)
        print()
    else:
        print(render_text(report))
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    from .synthgait import make_training_set

    if not args.synthetic:
        print("only --synthetic training data is available", file=sys.stderr)
        return 2
    windows, targets = make_training_set()
    config = TrainingConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        seed=args.seed,
        dropout_rate=args.dropout,
    )
    weights, losses = train_reference(windows, targets, config)
    print(
        f"trained on {windows.shape[0]} windows for {config.epochs} epochs: "
        f"loss {losses[0]:.6f} -> {losses[-1]:.6f}"
    )
    save_weights_file(args.out, weights)
    print(f"weights written to {args.out}")
    return 0


def cmd_weights_inspect(args: argparse.Namespace) -> int:
    weights = load_weights_file(args.weights_file)
    info = describe_weights(weights)
    blob = save_weights(weights)
    info["serialized_bytes"] = len(blob)
    info["sha256"] = hashlib.sha256(blob).hexdigest()
    for key, value in info.items():
        if key == "parameter_shapes":
            print("parameter_shapes:")
            for name, shape in value.items():
                print(f"  {name}: {shape}")
        else:
            print(f"{key}: {value}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_weights_arg(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--weights",
        metavar="FILE.agrfw",
        help="estimator weights (default: cached reference, trained on first use)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitfeedback",
        description="Real-time overground gait propulsion biofeedback engine.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    serve = sub.add_parser("serve", help="run a live session with a control socket")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=0, help="0 picks a free port")
    serve.add_argument(
        "--ingest", default="-",
        help="kinematic frames: '-' for CSV on stdin, or a .gaitbin/.csv file",
    )
    serve.add_argument(
        "--device", default="emulated",
        help="'emulated' (in-process armband), 'none', or HOST:PORT for UDP",
    )
    serve.add_argument("--participant", default="anonymous")
    serve.add_argument(
        "--don-seconds", type=float, default=None,
        help="auto-advance the device-donning stage after this many seconds",
    )
    serve.add_argument("--out", metavar="FILE.sessionl", help="write the session log")
    _add_weights_arg(serve)
    serve.set_defaults(func=cmd_serve)

    replay = sub.add_parser("replay", help="re-run a recorded ingest deterministically")
    replay.add_argument("ingest", metavar="FILE.gaitbin")
    replay.add_argument("--device", default="emulated")
    replay.add_argument("--participant", default="anonymous")
    replay.add_argument("--don-seconds", type=float, default=60.0)
    replay.add_argument("--out", metavar="FILE.sessionl")
    _add_weights_arg(replay)
    replay.set_defaults(func=cmd_replay)

    simulate = sub.add_parser(
        "simulate", help="closed-loop session against a synthetic participant"
    )
    simulate.add_argument(
        "--profile", required=True, choices=["responder", "nonresponder"]
    )
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", metavar="FILE.sessionl")
    _add_weights_arg(simulate)
    simulate.set_defaults(func=cmd_simulate)

    analyze = sub.add_parser("analyze", help="outcome battery for a session log")
    analyze.add_argument("log", metavar="FILE.sessionl")
    analyze.add_argument("--json", action="store_true", help="machine-readable output")
    analyze.set_defaults(func=cmd_analyze)

    train = sub.add_parser("train", help="train the estimator from scratch")
    train.add_argument(
        "--synthetic", action="store_true",
        help="use the deterministic synthetic gait corpus",
    )
    train.add_argument("--out", default="weights.agrfw", metavar="FILE.agrfw")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--epochs", type=int, default=TrainingConfig.epochs)
    train.add_argument(
        "--learning-rate", type=float, default=TrainingConfig.learning_rate
    )
    train.add_argument("--dropout", type=float, default=TrainingConfig.dropout_rate)
    train.set_defaults(func=cmd_train)

    weights = sub.add_parser("weights", help="weights-file utilities")
    weights_sub = weights.add_subparsers(dest="weights_verb", required=True)
    inspect = weights_sub.add_parser("inspect", help="describe a weights file")
    inspect.add_argument("weights_file", metavar="FILE.agrfw")
    inspect.set_defaults(func=cmd_weights_inspect)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GaitFeedbackError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:  # pragma: no cover
        print("interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
