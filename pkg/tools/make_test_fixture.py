#!/usr/bin/env python3
"""Regenerate tests/data/synthetic_10s.wav (checked in; deterministic).

Five tone bursts with distinct frequencies and light amplitude modulation,
separated by silences of at least 0.6 s, totalling exactly 10 s at 16 kHz.
"""

from pathlib import Path

import numpy as np

from essumm.audio_io import AudioBuffer, write_wav

RATE = 16000

SPANS = [
    ("tone", 1.2, 300.0),
    ("silence", 0.7, 0.0),
    ("tone", 1.5, 550.0),
    ("silence", 0.8, 0.0),
    ("tone", 2.0, 800.0),
    ("silence", 0.6, 0.0),
    ("tone", 1.4, 440.0),
    ("silence", 0.9, 0.0),
    ("tone", 0.9, 220.0),
]


def build() -> AudioBuffer:
    parts = []
    for kind, dur, freq in SPANS:
        n = int(round(dur * RATE))
        if kind == "silence":
            parts.append(np.zeros(n))
        else:
            t = np.arange(n) / RATE
            am = 1.0 + 0.25 * np.sin(2.0 * np.pi * 3.1 * t)
            parts.append(0.4 * am * np.sin(2.0 * np.pi * freq * t))
    return AudioBuffer(np.concatenate(parts), RATE)


if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic_10s.wav"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_wav(build(), out)
    print(f"wrote {out}")
