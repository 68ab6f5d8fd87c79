"""Streaming unsupervised fault prediction toolkit."""

__version__ = "0.1.0"

from .engine import Engine, EngineConfig, EventRecord  # noqa: E402,F401
from .rig import SimConfig, generate, truth_crossing  # noqa: E402,F401
from .svm import KernelSpec, OnlineSvm, batch_train  # noqa: E402,F401

__all__ = [
    "__version__",
    "Engine",
    "EngineConfig",
    "EventRecord",
    "SimConfig",
    "generate",
    "truth_crossing",
    "KernelSpec",
    "OnlineSvm",
    "batch_train",
]
