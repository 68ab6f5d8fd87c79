"""Deterministic pulse-echo waveform generator with an injectable fault.

Stands in for a physical inspection rig: every pulse period contains a
Hann-windowed tone burst, optionally followed by a delayed echo whose
amplitude ramps up linearly after the fault onset, plus seeded Gaussian
noise. Ground truth about the fault is returned on a side channel that the
detection engine never sees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SimConfig:
    total_samples: int = 655360
    pulse_period: int = 4096
    carrier_cycles: int = 8
    samples_per_cycle: int = 16
    burst_amp: float = 1.0
    echo_delay: int = 512
    echo_amp_max: float = 0.8
    fault_onset: int = field(default=-1)  # -1: 25% of the stream
    fault_ramp: int = field(default=-1)   # -1: 100 pulse periods
    noise_sd: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.total_samples <= 0:
            raise ConfigError("total_samples must be > 0")
        if self.pulse_period <= 0:
            raise ConfigError("pulse_period must be > 0")
        if self.carrier_cycles < 1:
            raise ConfigError("carrier_cycles must be >= 1")
        if self.samples_per_cycle < 4:
            raise ConfigError("samples_per_cycle must be >= 4")
        if self.burst_amp < 0:
            raise ConfigError("burst_amp must be >= 0")
        if self.echo_amp_max < 0:
            raise ConfigError("echo_amp_max must be >= 0")
        if self.noise_sd < 0:
            raise ConfigError("noise_sd must be >= 0")
        object.__setattr__(self, "fault_onset",
                           self.total_samples // 4 if self.fault_onset < 0 else self.fault_onset)
        object.__setattr__(self, "fault_ramp",
                           100 * self.pulse_period if self.fault_ramp < 0 else self.fault_ramp)
        if self.fault_ramp < 1:
            raise ConfigError("fault_ramp must be >= 1")
        burst_len = self.burst_len
        if not burst_len < self.echo_delay:
            raise ConfigError("echo_delay must exceed the burst length")
        if not self.echo_delay + burst_len < self.pulse_period:
            raise ConfigError("echo must fit inside the pulse period")

    @property
    def burst_len(self) -> int:
        return self.carrier_cycles * self.samples_per_cycle


@dataclass(frozen=True)
class GroundTruth:
    fault_onset: int
    ramp: int
    echo_amp_max: float
    first_exceed: int  # first sample with a strictly positive echo amplitude


def _hann(i: np.ndarray, length: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * i / (length - 1)))


def echo_amplitude(cfg: SimConfig, t: np.ndarray) -> np.ndarray:
    """Instantaneous echo amplitude A(t): linear ramp clamped to [0, max]."""
    frac = np.clip((np.asarray(t, dtype=float) - cfg.fault_onset) / cfg.fault_ramp, 0.0, 1.0)
    return cfg.echo_amp_max * frac


def generate(cfg: SimConfig) -> tuple[np.ndarray, Optional[GroundTruth]]:
    """Produce the full sample stream and, when faulted, its ground truth.

    Returns (values, truth) where values[t] is the amplitude at sample t.
    Deterministic for a fixed config (noise comes from a seeded generator).
    """
    n = cfg.total_samples
    nb = cfg.burst_len
    t = np.arange(n, dtype=np.int64)
    phase = t % cfg.pulse_period
    values = np.zeros(n, dtype=float)

    in_burst = phase < nb
    i = phase[in_burst].astype(float)
    values[in_burst] += cfg.burst_amp * np.sin(2.0 * np.pi * i / cfg.samples_per_cycle) \
        * _hann(i, nb)

    in_echo = (phase >= cfg.echo_delay) & (phase < cfg.echo_delay + nb)
    j = (phase[in_echo] - cfg.echo_delay).astype(float)
    amp = echo_amplitude(cfg, t[in_echo])
    values[in_echo] += amp * np.sin(2.0 * np.pi * j / cfg.samples_per_cycle) * _hann(j, nb)

    if cfg.noise_sd > 0:
        rng = np.random.default_rng(cfg.seed)
        values += cfg.noise_sd * rng.standard_normal(n)

    truth = None
    if cfg.echo_amp_max > 0:
        truth = GroundTruth(cfg.fault_onset, cfg.fault_ramp, cfg.echo_amp_max,
                            cfg.fault_onset + 1)
    return values, truth


def truth_crossing(truth: Optional[GroundTruth], theta_amp: float) -> Optional[int]:
    """Earliest sample where the echo amplitude reaches theta_amp, if ever."""
    if theta_amp < 0:
        raise ConfigError("theta_amp must be >= 0")
    if truth is None or truth.echo_amp_max <= 0 or theta_amp > truth.echo_amp_max:
        return None
    steps = int(np.ceil(truth.ramp * theta_amp / truth.echo_amp_max))
    return truth.fault_onset + steps
