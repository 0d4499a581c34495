"""Line-delimited ground-truth sidecar files (.truth).

A .truth file pairs with a .gaitbin replay: one JSON object per line — a
meta header, then every ground-truth event, then every stance record. The
per-frame AGRF series is intentionally not stored; it is reproducible from
the profile in the meta line (the generator is deterministic).
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import List, Optional, Tuple

from ..core.types import Limb, NOMINAL_FRAME_INTERVAL_US
from ..errors import GaitFeedbackError
from ..gaitevents.types import EventKind, GaitEvent
from .generator import GroundTruth, StanceTruth
from .profile import GaitProfile

TRUTH_FORMAT_VERSION = 1


class BadTruthFile(GaitFeedbackError):
    """A .truth file that cannot be parsed back into ground truth."""


def write_truth(
    path,
    truth: GroundTruth,
    profile: Optional[GaitProfile] = None,
    n_frames: Optional[int] = None,
) -> None:
    path = Path(path)
    meta = {
        "record": "meta",
        "version": TRUTH_FORMAT_VERSION,
        "dt_us": truth.dt_us,
        "n_frames": int(n_frames) if n_frames is not None else int(truth.agrf_bw.shape[0]),
        "profile": dataclasses.asdict(profile) if profile is not None else None,
    }
    with path.open("w", encoding="utf-8") as fp:
        fp.write(json.dumps(meta) + "\n")
        for ev in truth.events:
            fp.write(
                json.dumps(
                    {
                        "record": "event",
                        "kind": ev.kind.value,
                        "frame": ev.frame_index,
                        "timestamp_us": ev.timestamp_us,
                        "side": ev.side.value,
                    }
                )
                + "\n"
            )
        for st in truth.stances:
            fp.write(
                json.dumps(
                    {
                        "record": "stance",
                        "stride": st.stride,
                        "peak_bw": st.peak_bw,
                        "scheduled_bw": st.scheduled_bw,
                        "contact_frame": st.contact_frame,
                        "swing_frame": st.swing_frame,
                        "peak_frame": st.peak_frame,
                    }
                )
                + "\n"
            )


def read_truth(path) -> Tuple[dict, List[GaitEvent], List[StanceTruth]]:
    """Parse a .truth file; returns (meta, events, stances)."""
    path = Path(path)
    meta: Optional[dict] = None
    events: List[GaitEvent] = []
    stances: List[StanceTruth] = []
    with path.open("r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BadTruthFile(f"line {lineno}: not valid JSON: {exc}") from exc
            kind = obj.get("record")
            try:
                if kind == "meta":
                    if obj["version"] != TRUTH_FORMAT_VERSION:
                        raise BadTruthFile(
                            f"line {lineno}: unsupported version {obj['version']}"
                        )
                    meta = obj
                elif kind == "event":
                    events.append(
                        GaitEvent(
                            timestamp_us=int(obj["timestamp_us"]),
                            frame_index=int(obj["frame"]),
                            kind=EventKind(obj["kind"]),
                            side=Limb(obj["side"]),
                        )
                    )
                elif kind == "stance":
                    stances.append(
                        StanceTruth(
                            stride=int(obj["stride"]),
                            peak_bw=float(obj["peak_bw"]),
                            scheduled_bw=float(obj["scheduled_bw"]),
                            contact_frame=int(obj["contact_frame"]),
                            swing_frame=int(obj["swing_frame"]),
                            peak_frame=int(obj["peak_frame"]),
                        )
                    )
                else:
                    raise BadTruthFile(f"line {lineno}: unknown record kind {kind!r}")
            except (KeyError, ValueError) as exc:
                raise BadTruthFile(f"line {lineno}: malformed record: {exc}") from exc
    if meta is None:
        raise BadTruthFile("missing meta record")
    return meta, events, stances


def truth_from_file(path) -> GroundTruth:
    """Rebuild a GroundTruth (without the AGRF series) from a .truth file."""
    import numpy as np

    meta, events, stances = read_truth(path)
    return GroundTruth(
        agrf_bw=np.empty(0),
        events=events,
        stances=stances,
        dt_us=int(meta.get("dt_us", NOMINAL_FRAME_INTERVAL_US)),
    )
