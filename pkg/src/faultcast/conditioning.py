"""Per-sample noise suppression and frame-level feature extraction.

Two causal smoothers are available: a scalar random-walk Kalman filter and
a windowed moving average. The chain order when both are enabled is Kalman
first, then moving average.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import ConfigError
from .signals import FEATURE_DIM

FILTER_MODES = ("none", "ma", "kalman", "both")


class MovingAverageFilter:
    """Causal moving average with partial-window warm-up.

    Output is the mean of the last min(window, samples seen) inputs, so
    the chain produces output from the very first sample.
    """

    def __init__(self, window: int):
        if window < 1:
            raise ConfigError("moving average window must be >= 1")
        self.window = window
        self._buf: deque[float] = deque(maxlen=window)
        self._sum = 0.0

    def step(self, z: float) -> float:
        if len(self._buf) == self.window:
            self._sum -= self._buf[0]
        self._buf.append(z)
        self._sum += z
        return self._sum / len(self._buf)


class KalmanFilter:
    """Scalar random-walk Kalman filter (identity observation).

    The first measurement initializes the estimate (xhat = z, p = r);
    afterwards each step is predict (p += q) then correct with gain
    K = p_pred / (p_pred + r).
    """

    def __init__(self, q: float, r: float):
        if r <= 0:
            raise ConfigError("measurement-noise variance r must be > 0")
        if q < 0:
            raise ConfigError("process-noise variance q must be >= 0")
        self.q = q
        self.r = r
        self.xhat = 0.0
        self.p = 0.0
        self._seen = False

    @property
    def predicted_variance(self) -> float:
        """Prior variance the next step would use (p + q)."""
        return self.p + self.q

    def step(self, z: float) -> float:
        if not self._seen:
            self._seen = True
            self.xhat = z
            self.p = self.r
            return self.xhat
        p_pred = self.p + self.q
        gain = p_pred / (p_pred + self.r)
        self.xhat = self.xhat + gain * (z - self.xhat)
        self.p = (1.0 - gain) * p_pred
        return self.xhat


class FilterChain:
    """Configured conditioning chain: none | ma | kalman | both."""

    def __init__(self, mode: str, ma_window: int = 3, kalman_q: float = 0.5,
                 kalman_r: float = 1.0):
        if mode not in FILTER_MODES:
            raise ConfigError(f"unknown filter mode {mode!r}")
        self.mode = mode
        self._kalman = KalmanFilter(kalman_q, kalman_r) if mode in ("kalman", "both") else None
        self._ma = MovingAverageFilter(ma_window) if mode in ("ma", "both") else None

    def step(self, z: float) -> float:
        y = z
        if self._kalman is not None:
            y = self._kalman.step(y)
        if self._ma is not None:
            y = self._ma.step(y)
        return y


def extract_features(samples: np.ndarray) -> np.ndarray:
    """Summarize one frame as (rms, peak, crest, zcr).

    crest is 0 for an all-zero frame; zcr counts strict sign changes with
    zero treated as positive, normalized by frame_len - 1.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("frame must be a 1-D array of length >= 2")
    rms = float(np.sqrt(np.mean(x * x)))
    peak = float(np.max(np.abs(x)))
    crest = peak / rms if rms > 0 else 0.0
    nonneg = x >= 0.0
    changes = int(np.count_nonzero(nonneg[1:] != nonneg[:-1]))
    zcr = changes / (x.size - 1)
    out = np.empty(FEATURE_DIM, dtype=float)
    out[0], out[1], out[2], out[3] = rms, peak, crest, zcr
    return out
