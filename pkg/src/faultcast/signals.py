"""Core signal value types and frame assembly.

A stream is a sequence of (t, value) samples with strictly increasing t.
Frames are fixed-length windows cut from the conditioned stream; feature
extraction downstream consumes one frame at a time.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Optional

import numpy as np

from .errors import StreamOrderError

# Feature vector layout used throughout the package.
FEATURE_NAMES = ("rms", "peak", "crest", "zcr")
FEATURE_DIM = 4
F_RMS, F_PEAK, F_CREST, F_ZCR = range(4)

LABEL_NORMAL = -1
LABEL_FAULT = 1


class RawSample(NamedTuple):
    t: int
    value: float


class Frame(NamedTuple):
    start_t: int
    samples: np.ndarray  # shape (frame_len,)


class FrameAssembler:
    """Cuts a sample stream into overlapping frames.

    Emits a frame as soon as `frame_len` samples are available, then slides
    by `hop_len`. A trailing partial window is never emitted. Sample indices
    must strictly increase; a violation raises StreamOrderError and leaves
    the assembler state untouched.
    """

    def __init__(self, frame_len: int, hop_len: int):
        if frame_len < 2:
            raise ValueError("frame_len must be >= 2")
        if not 1 <= hop_len <= frame_len:
            raise ValueError("hop_len must be in [1, frame_len]")
        self.frame_len = frame_len
        self.hop_len = hop_len
        self._buf: list[float] = []
        self._ts: list[int] = []
        self._last_t: Optional[int] = None

    @property
    def pending(self) -> int:
        return len(self._buf)

    def push(self, t: int, value: float) -> Optional[Frame]:
        if self._last_t is not None and t <= self._last_t:
            raise StreamOrderError(f"sample index {t} does not increase past {self._last_t}")
        self._last_t = t
        self._buf.append(float(value))
        self._ts.append(t)
        if len(self._buf) < self.frame_len:
            return None
        frame = Frame(self._ts[0], np.asarray(self._buf, dtype=float))
        # retain the overlap for the next window
        self._buf = self._buf[self.hop_len:]
        self._ts = self._ts[self.hop_len:]
        return frame


def assemble_frames(samples: Iterable[RawSample], frame_len: int, hop_len: int) -> list[Frame]:
    """Offline frame assembly; pure function of its input."""
    asm = FrameAssembler(frame_len, hop_len)
    frames = []
    for t, value in samples:
        frame = asm.push(t, value)
        if frame is not None:
            frames.append(frame)
    return frames


def frame_count(n_samples: int, frame_len: int, hop_len: int) -> int:
    """Number of full frames a stream of n_samples yields."""
    if n_samples < frame_len:
        return 0
    return (n_samples - frame_len) // hop_len + 1
