"""Streaming orchestrator: one sample in, fault events out.

Pipeline per sample: conditioning filter chain -> frame assembly; per
completed frame: feature extraction -> quantization-error pseudo-labeling
-> incremental SVM update -> anomaly score -> trend extrapolation.

The first `calib_frames` frames are assumed healthy: they fit the map,
freeze feature normalization, and set the pseudo-label threshold. Until the
SVM has seen both classes the anomaly score falls back to the normalized
quantization-error excess, so the detection boundary stays at zero in both
regimes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .conditioning import FilterChain, extract_features
from .errors import InsufficientDataError, PhaseError, SolverError, TrainingError
from .signals import F_PEAK, FrameAssembler
from .som import CalibrationStats, Normalizer, SelfOrganizingMap, pseudo_label
from .svm import KernelSpec, OnlineSvm
from .tune import ParamGrid, TuneResult, grid_search

CALIBRATING, BOOTSTRAP, FULL = "CALIBRATING", "BOOTSTRAP", "FULL"

# offset added to the global seed for the map's private RNG stream
SOM_SEED_OFFSET = 1


@dataclass(frozen=True)
class FilterParams:
    mode: str = "both"
    ma_window: int = 3
    kalman_q: float = 0.5
    kalman_r: float = 1.0


@dataclass(frozen=True)
class SomParams:
    grid: int = 8
    alpha0: float = 0.5
    alpha_final: float = 0.01
    sigma0: float | None = None
    sigma_final: float = 0.5
    epochs: int = 10
    k_label: float = 3.0


@dataclass(frozen=True)
class SvmParams:
    kernel: str = "rbf"
    gamma: float = 0.5
    c: float = 10.0
    budget: int = 256
    epsilon: float = 1e-6


@dataclass(frozen=True)
class TuneParams:
    c_values: tuple[float, ...] = (0.1, 1.0, 10.0, 100.0)
    gamma_values: tuple[float, ...] = (0.01, 0.1, 1.0, 10.0)
    k_folds: int = 5
    interval: int = 200

    def grid(self) -> ParamGrid:
        return ParamGrid(self.c_values, self.gamma_values, self.k_folds)


@dataclass(frozen=True)
class EngineConfig:
    frame_len: int = 256
    hop_len: int = 128
    filter: FilterParams = field(default_factory=FilterParams)
    som: SomParams = field(default_factory=SomParams)
    svm: SvmParams = field(default_factory=SvmParams)
    tune: TuneParams = field(default_factory=TuneParams)
    calib_frames: int = 384
    trend_window: int = 64
    slope_min: float = 1e-3
    detect_threshold: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.calib_frames < 10:
            raise ValueError("calib_frames must be >= 10")
        if self.trend_window < 3:
            raise ValueError("trend_window must be >= 3")
        if self.slope_min <= 0:
            raise ValueError("slope_min must be > 0")


@dataclass(frozen=True)
class EventRecord:
    t: int
    kind: str
    score: float
    eta: Optional[float] = None
    amplitude: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"t": self.t, "kind": self.kind, "score": self.score}
        if self.eta is not None:
            out["eta"] = self.eta
        if self.amplitude is not None:
            out["amplitude"] = self.amplitude
        out["detail"] = self.detail
        return out


def _ols(x: np.ndarray, y: np.ndarray) -> Optional[tuple[float, float]]:
    """Least-squares line fit; None when the time axis is degenerate."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x.mean()
    var = float(np.mean((x - xm) ** 2))
    if var <= 0:
        return None
    ym = y.mean()
    slope = float(np.mean((x - xm) * (y - ym)) / var)
    return slope, float(ym - slope * xm)


def predict_fault(times: np.ndarray, scores: np.ndarray, peaks: np.ndarray,
                  theta: float, slope_min: float) -> Optional[tuple[float, float]]:
    """Trend extrapolation over the score history.

    Returns (eta, amplitude) in the units of `times`: eta == 0 flags an
    immediate threshold crossing at the newest entry, eta > 0 is the
    forecast distance to the crossing of the fitted score line, with the
    peak series extrapolated to that moment. None means no fault trend.
    """
    scores = np.asarray(scores, dtype=float)
    times = np.asarray(times, dtype=float)
    peaks = np.asarray(peaks, dtype=float)
    if scores[-1] >= theta:
        return 0.0, float(peaks[-1])
    fit = _ols(times, scores)
    if fit is None:
        return None
    slope, intercept = fit
    if slope <= slope_min:
        return None
    t_cross = (theta - intercept) / slope
    eta = t_cross - times[-1]
    if eta <= 0:
        return None
    peak_fit = _ols(times, peaks)
    if peak_fit is None:
        amplitude = float(peaks[-1])
    else:
        amplitude = peak_fit[0] * t_cross + peak_fit[1]
    return float(eta), float(amplitude)


class Engine:
    """Single-writer streaming state machine; one ingest call at a time."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.phase = CALIBRATING
        self._chain = FilterChain(config.filter.mode, config.filter.ma_window,
                                  config.filter.kalman_q, config.filter.kalman_r)
        self._assembler = FrameAssembler(config.frame_len, config.hop_len)
        self._last_t: Optional[int] = None
        self._frames_seen = 0
        self._calib: list[np.ndarray] = []
        self.normalizer: Optional[Normalizer] = None
        self.som: Optional[SelfOrganizingMap] = None
        self.calib_stats: Optional[CalibrationStats] = None
        self.svm = self._new_svm(config.svm.c, config.svm.gamma)
        self._buffer: deque[tuple[np.ndarray, int]] = deque(maxlen=config.svm.budget)
        self._history: deque[tuple[int, float]] = deque(maxlen=config.trend_window)
        self._peaks: deque[float] = deque(maxlen=config.trend_window)
        self._since_tune = 0
        self.tuned: Optional[TuneResult] = None

    def _new_svm(self, c: float, gamma: float) -> OnlineSvm:
        p = self.config.svm
        spec = KernelSpec("rbf", gamma) if p.kernel == "rbf" else KernelSpec("linear")
        return OnlineSvm(spec, c, epsilon=p.epsilon, budget=p.budget)

    # ------------------------------------------------------------------

    @property
    def last_t(self) -> int:
        """Index of the last accepted sample, -1 before any."""
        return -1 if self._last_t is None else self._last_t

    def ingest(self, t: int, value: float) -> list[EventRecord]:
        """Feed one sample; returns events for frames completed by it."""
        if self._last_t is not None and t <= self._last_t:
            return [EventRecord(self._last_t, "stream_error", 0.0,
                                detail=f"non-monotone sample index {t} after {self._last_t}")]
        self._last_t = t
        filtered = self._chain.step(float(value))
        frame = self._assembler.push(t, filtered)
        if frame is None:
            return []
        return self._process_frame(t, frame.samples)

    def score_frame(self, fv_normalized: np.ndarray, qe: float) -> float:
        """Anomaly score with a consistent zero boundary in both phases."""
        if self.phase == CALIBRATING:
            raise PhaseError("scoring requires a completed calibration")
        if self.phase == FULL:
            return self.svm.decision(fv_normalized)
        stats = self.calib_stats
        return (qe - stats.threshold) / max(stats.sd_qe, 1e-12)

    def stats(self) -> dict:
        return {
            "phase": self.phase,
            "frames_seen": self._frames_seen,
            "svm_points": self.svm.n_points,
            "buffer_len": len(self._buffer),
            "history_len": len(self._history),
            "pending_samples": self._assembler.pending,
            "calib_pending": len(self._calib),
        }

    def tune_now(self) -> TuneResult:
        """Offline grid search over the current labeled buffer."""
        if self.phase == CALIBRATING or not self._buffer:
            raise InsufficientDataError("engine has not calibrated and labeled any data yet")
        X = np.array([fv for fv, _ in self._buffer], dtype=float)
        y = np.array([lab for _, lab in self._buffer], dtype=int)
        return grid_search(X, y, self.config.tune.grid(), self.config.svm.kernel)

    # ------------------------------------------------------------------

    def _process_frame(self, t: int, samples: np.ndarray) -> list[EventRecord]:
        events: list[EventRecord] = []
        frame_idx = self._frames_seen
        self._frames_seen += 1
        fv_raw = extract_features(samples)

        if self.phase == CALIBRATING:
            self._calib.append(fv_raw)
            if len(self._calib) >= self.config.calib_frames:
                events.append(self._finish_calibration(t))
            return events

        fv = self.normalizer.transform(fv_raw)
        qe = self.som.quantization_error(fv)
        label = pseudo_label(self.calib_stats, qe)
        self._buffer.append((fv, label))
        try:
            self.svm.learn_one(fv, label)
        except SolverError as exc:
            events.append(EventRecord(t, "stream_error", 0.0,
                                      detail=f"svm update failed, point skipped: {exc}"))
        if self.phase == BOOTSTRAP and self.svm.has_both_classes:
            self.phase = FULL

        score = self.score_frame(fv, qe)
        self._history.append((frame_idx, score))
        self._peaks.append(float(fv_raw[F_PEAK]))

        if len(self._history) == self.config.trend_window:
            events.extend(self._trend_events(t, score))

        self._since_tune += 1
        if self._since_tune >= self.config.tune.interval:
            self._since_tune = 0
            retune = self._retune(t)
            if retune is not None:
                events.append(retune)
        return events

    def _finish_calibration(self, t: int) -> EventRecord:
        feats = np.asarray(self._calib, dtype=float)
        self._calib = []
        self.normalizer = Normalizer.fit(feats)
        z = self.normalizer.transform(feats)
        p = self.config.som
        self.som = SelfOrganizingMap(
            p.grid, dim=feats.shape[1], alpha0=p.alpha0, alpha_final=p.alpha_final,
            sigma0=p.sigma0, sigma_final=p.sigma_final,
            seed=self.config.seed + SOM_SEED_OFFSET,
        ).fit(z, epochs=p.epochs)
        qes = np.array([self.som.quantization_error(x) for x in z])
        self.calib_stats = CalibrationStats.from_errors(qes, p.k_label)
        self.phase = BOOTSTRAP
        detail = (f"som fitted on {feats.shape[0]} frames; "
                  f"qe mu={self.calib_stats.mu_qe:.6g} sd={self.calib_stats.sd_qe:.6g}")
        return EventRecord(t, "calibrated", 0.0, detail=detail)

    def _trend_events(self, t: int, score: float) -> list[EventRecord]:
        times = np.array([h[0] for h in self._history], dtype=float)
        scores = np.array([h[1] for h in self._history], dtype=float)
        peaks = np.array(self._peaks, dtype=float)
        res = predict_fault(times, scores, peaks, self.config.detect_threshold,
                            self.config.slope_min)
        if res is None:
            return []
        eta_frames, amplitude = res
        if eta_frames == 0.0:
            return [EventRecord(t, "fault_detected", score,
                                detail=f"score {score:.6g} at detection threshold")]
        eta_samples = eta_frames * self.config.hop_len
        return [EventRecord(t, "fault_predicted", score, eta=eta_samples,
                            amplitude=amplitude,
                            detail=f"trend crosses threshold in {eta_samples:.6g} samples")]

    def _retune(self, t: int) -> Optional[EventRecord]:
        X = np.array([fv for fv, _ in self._buffer], dtype=float)
        y = np.array([lab for _, lab in self._buffer], dtype=int)
        try:
            result = grid_search(X, y, self.config.tune.grid(), self.config.svm.kernel)
        except (InsufficientDataError, TrainingError, SolverError):
            return None
        self.tuned = result
        self._rebuild_svm(result)
        return EventRecord(
            t, "retune", result.cv_accuracy,
            detail=f"c={result.c:g} gamma={result.gamma:g} "
                   f"cv_accuracy={result.cv_accuracy:.6g}")

    def _rebuild_svm(self, result: TuneResult) -> None:
        model = self._new_svm(result.c, result.gamma)
        for fv, label in self._buffer:
            try:
                model.learn_one(fv, label)
            except SolverError:
                continue
        self.svm = model
