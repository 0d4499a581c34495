#!/usr/bin/env python3
"""Stream synthetic kinematic frames as CSV on stdout, paced.

Feeds `gaitfeedback serve --ingest -` for the console's end-to-end smoke
test. Pacing keeps the socket alive long enough for a client to connect and
drive the session; it does not try to match real time.
"""

import sys
import time

from gaitfeedback.core import write_csv
from gaitfeedback.synthgait import GaitProfile, generate


def paced(frames, delay_s):
    for frame in frames:
        yield frame
        time.sleep(delay_s)


def main() -> int:
    duration_s = float(sys.argv[1]) if len(sys.argv) > 1 else 40.0
    delay_s = float(sys.argv[2]) if len(sys.argv) > 2 else 0.002
    frames, _truth = generate(GaitProfile(seed=7), duration_s)
    sys.stdout.reconfigure(line_buffering=True)
    write_csv(sys.stdout, paced(frames, delay_s))
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except BrokenPipeError:
        sys.exit(0)  # the session ended first; that's fine
