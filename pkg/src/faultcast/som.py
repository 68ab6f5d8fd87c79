"""Self-organizing map used as the unsupervised labeler.

A square grid of codebook vectors is trained on the calibration set with
exponentially decaying learning rate and Gaussian neighborhood. After
calibration the map is frozen; streaming vectors are scored by their
quantization error (distance to the best matching unit) and pseudo-labeled
by an outlier threshold on that error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError
from .signals import LABEL_FAULT, LABEL_NORMAL


class SelfOrganizingMap:
    """Square-grid SOM over feature space.

    Args:
        grid_size: side length G of the G x G unit grid.
        dim: feature dimension of the codebook vectors.
        alpha0 / alpha_final: initial and final learning rates.
        sigma0 / sigma_final: initial and final neighborhood radii in grid
            units (sigma0 defaults to G / 2).
        seed: RNG seed for codebook initialization.
    """

    def __init__(self, grid_size: int, dim: int = 4, alpha0: float = 0.5,
                 alpha_final: float = 0.01, sigma0: float | None = None,
                 sigma_final: float = 0.5, seed: int = 0):
        if grid_size < 1:
            raise CalibrationError("grid size must be >= 1")
        if not 0 < alpha_final <= alpha0 < 1:
            raise CalibrationError("need 0 < alpha_final <= alpha0 < 1")
        if sigma0 is None:
            sigma0 = max(grid_size / 2.0, 0.5)
        if sigma_final <= 0 or sigma0 <= 0 or sigma_final > sigma0:
            raise CalibrationError("need 0 < sigma_final <= sigma0")
        self.grid_size = grid_size
        self.dim = dim
        self.alpha0 = alpha0
        self.alpha_final = alpha_final
        self.sigma0 = sigma0
        self.sigma_final = sigma_final
        self.seed = seed
        self.codebook = np.zeros((grid_size * grid_size, dim), dtype=float)
        rows, cols = np.divmod(np.arange(grid_size * grid_size), grid_size)
        self._coords = np.stack([rows, cols], axis=1).astype(float)
        self.fitted = False

    def _bmu_flat(self, x: np.ndarray) -> int:
        diff = self.codebook - x
        d2 = np.einsum("ij,ij->i", diff, diff)
        # argmin returns the first minimum, i.e. the smallest row-major index
        return int(np.argmin(d2))

    def bmu(self, x: np.ndarray) -> tuple[int, int]:
        """Best matching unit as (row, col); ties break row-major."""
        flat = self._bmu_flat(np.asarray(x, dtype=float))
        return divmod(flat, self.grid_size)

    def quantization_error(self, x: np.ndarray) -> float:
        """Euclidean distance from x to its BMU codebook vector."""
        x = np.asarray(x, dtype=float)
        flat = self._bmu_flat(x)
        return float(np.linalg.norm(self.codebook[flat] - x))

    def train_step(self, x: np.ndarray, step: int, total_steps: int) -> None:
        """One neighborhood-weighted update of the whole codebook."""
        if not 0 <= step < total_steps:
            raise ValueError("step must satisfy 0 <= step < total_steps")
        x = np.asarray(x, dtype=float)
        frac = step / total_steps
        alpha = self.alpha0 * (self.alpha_final / self.alpha0) ** frac
        sigma = self.sigma0 * (self.sigma_final / self.sigma0) ** frac
        bmu_coord = self._coords[self._bmu_flat(x)]
        delta = self._coords - bmu_coord
        d2 = np.einsum("ij,ij->i", delta, delta)
        h = np.exp(-d2 / (2.0 * sigma * sigma))
        self.codebook += (alpha * h)[:, None] * (x - self.codebook)

    def fit(self, data: np.ndarray, epochs: int = 10) -> "SelfOrganizingMap":
        """Initialize from sampled data points and train by cycling the data.

        Deterministic for a fixed (data, config, seed).
        """
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[0] == 0:
            raise CalibrationError("calibration data must be a non-empty 2-D array")
        if data.shape[1] != self.dim:
            raise CalibrationError(f"expected feature dim {self.dim}, got {data.shape[1]}")
        n = data.shape[0]
        rng = np.random.default_rng(self.seed)
        idx = rng.integers(0, n, size=self.grid_size * self.grid_size)
        self.codebook = data[idx].copy()
        self.init_codebook = self.codebook.copy()
        total = max(1, epochs * n)
        for s in range(total):
            self.train_step(data[s % n], s, total)
        self.fitted = True
        return self

    def mean_quantization_error(self, data: np.ndarray) -> float:
        data = np.asarray(data, dtype=float)
        return float(np.mean([self.quantization_error(x) for x in data]))


class Normalizer:
    """Per-dimension z-normalization frozen at calibration end."""

    def __init__(self, mean: np.ndarray, std: np.ndarray):
        self.mean = np.asarray(mean, dtype=float)
        std = np.asarray(std, dtype=float)
        # constant dimensions pass through unscaled
        self.std = np.where(std > 1e-12, std, 1.0)

    @classmethod
    def fit(cls, data: np.ndarray) -> "Normalizer":
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[0] == 0:
            raise CalibrationError("normalizer needs a non-empty 2-D array")
        return cls(data.mean(axis=0), data.std(axis=0))

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.std


@dataclass(frozen=True)
class CalibrationStats:
    """Quantization-error statistics of the calibration set."""

    mu_qe: float
    sd_qe: float
    k_label: float

    def __post_init__(self):
        if self.mu_qe < 0 or self.sd_qe < 0:
            raise CalibrationError("quantization-error statistics must be >= 0")
        if self.k_label <= 0:
            raise CalibrationError("outlier multiplier k_label must be > 0")

    @property
    def threshold(self) -> float:
        return self.mu_qe + self.k_label * self.sd_qe

    @classmethod
    def from_errors(cls, qes: np.ndarray, k_label: float) -> "CalibrationStats":
        qes = np.asarray(qes, dtype=float)
        if qes.size == 0:
            raise CalibrationError("no quantization errors to calibrate on")
        return cls(float(qes.mean()), float(qes.std()), k_label)


def pseudo_label(stats: CalibrationStats, qe: float) -> int:
    """+1 (fault) when qe exceeds the outlier threshold, else -1 (normal)."""
    return LABEL_FAULT if qe > stats.threshold else LABEL_NORMAL
