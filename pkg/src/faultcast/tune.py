"""Periodic hyperparameter selection from buffered pseudo-labeled data.

Grid search over (C, gamma) scored by deterministic k-fold cross-validation.
Folds are contiguous strides of the buffer (fold i holds every k-th point
starting at i), which preserves arrival order and needs no extra RNG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError
from .svm import KernelSpec, batch_train


@dataclass(frozen=True)
class ParamGrid:
    c_values: tuple[float, ...] = (0.1, 1.0, 10.0, 100.0)
    gamma_values: tuple[float, ...] = (0.01, 0.1, 1.0, 10.0)
    k_folds: int = 5

    def __post_init__(self):
        for name, vals in (("c_values", self.c_values), ("gamma_values", self.gamma_values)):
            if not vals:
                raise ValueError(f"{name} must be non-empty")
            if any(v <= 0 for v in vals):
                raise ValueError(f"{name} must be positive")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly ascending")
        if self.k_folds < 2:
            raise ValueError("k_folds must be >= 2")


@dataclass(frozen=True)
class TuneResult:
    c: float
    gamma: float
    cv_accuracy: float


def _kernel_spec(kind: str, gamma: float) -> KernelSpec:
    return KernelSpec(kind, gamma) if kind == "rbf" else KernelSpec("linear")


def cross_validate(X: np.ndarray, y: np.ndarray, kernel_kind: str, c: float,
                   gamma: float, k: int) -> float:
    """Mean held-out sign accuracy over k contiguous-stride folds."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int).ravel()
    n = y.shape[0]
    if int((y > 0).sum()) < k or int((y < 0).sum()) < k:
        raise InsufficientDataError(f"need at least {k} points of each class")
    spec = _kernel_spec(kernel_kind, gamma)
    accs = []
    for i in range(k):
        held = np.arange(i, n, k)
        mask = np.ones(n, dtype=bool)
        mask[held] = False
        y_train = y[mask]
        if (y_train > 0).sum() == 0 or (y_train < 0).sum() == 0:
            raise InsufficientDataError("a training split lost one class entirely")
        model = batch_train(X[mask], y_train, spec, c)
        pred = np.where(model.decision_many(X[held]) >= 0, 1, -1)
        accs.append(float(np.mean(pred == y[held])))
    return float(np.mean(accs))


def grid_search(X: np.ndarray, y: np.ndarray, grid: ParamGrid,
                kernel_kind: str) -> TuneResult:
    """Exhaustive search; ties prefer the smallest c, then the smallest gamma."""
    best: TuneResult | None = None
    for c in grid.c_values:
        for gamma in grid.gamma_values:
            acc = cross_validate(X, y, kernel_kind, c, gamma, grid.k_folds)
            if best is None or acc > best.cv_accuracy or (
                acc == best.cv_accuracy and (c, gamma) < (best.c, best.gamma)
            ):
                best = TuneResult(c, gamma, acc)
    return best
