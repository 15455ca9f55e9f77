#!/usr/bin/env python3
# Regenerates the two-subject fixture recordings (Rest and Load for each).
# Output is checked in; rerun only when the fixture design changes.
import json
import struct
import sys
from pathlib import Path

import numpy as np

LABELS = ["Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8", "T3", "C3", "Cz",
          "C4", "T4", "T5", "P3", "Pz", "P4", "T6", "O1", "O2"]
FS = 250.0
N = 2000

SUBJECTS = [
    {"subject_id": "Subject00", "age": 21, "gender": "female", "arithmetic_score": 9},
    {"subject_id": "Subject01", "age": 18, "gender": "male", "arithmetic_score": 29},
]


def recording(rng, condition):
    maps = rng.standard_normal((4, len(LABELS)))
    t = np.arange(N) / FS
    data = np.zeros((len(LABELS), N))
    pos = 0
    state = 0
    while pos < N:
        dur = int(rng.integers(10, 30)) if condition == "Rest" else int(rng.integers(6, 18))
        state = (state + int(rng.integers(1, 4))) % 4
        seg = slice(pos, min(N, pos + dur))
        data[:, seg] += np.outer(maps[state], np.ones(seg.stop - seg.start))
        pos += dur
    envelope = 20.0 * np.abs(np.sin(2 * np.pi * (10.0 if condition == "Rest" else 6.0) * t))
    data *= envelope
    data += 2.0 * rng.standard_normal(data.shape)
    data += 15.0 * np.sin(2 * np.pi * 50.0 * t)
    data += 40.0
    return data


def write_raw(path, data):
    with open(path, "wb") as f:
        f.write(b"EEGR")
        f.write(struct.pack("<IQ", data.shape[0], data.shape[1]))
        f.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240607)
    for subj in SUBJECTS:
        for cond in ("Rest", "Load"):
            stem = f"{subj['subject_id']}_{cond.lower()}"
            write_raw(out / f"{stem}.eegr", recording(rng, cond))
            meta = dict(subj, condition=cond, sampling_rate_hz=FS, channel_labels=LABELS)
            (out / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "fixture")
