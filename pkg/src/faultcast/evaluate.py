"""Scoring of an event stream against simulator ground truth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .rig import GroundTruth, truth_crossing

FAULT_KINDS = ("fault_detected", "fault_predicted")


@dataclass(frozen=True)
class EvalReport:
    detected: bool
    detection_delay: Optional[int]  # samples past first_exceed; present when detected
    false_alarms: int
    eta_mape: float
    events_total: int

    def to_dict(self) -> dict:
        out: dict = {"detected": self.detected}
        if self.detection_delay is not None:
            out["detection_delay"] = self.detection_delay
        out["false_alarms"] = self.false_alarms
        out["eta_mape"] = self.eta_mape
        out["events_total"] = self.events_total
        return out


def evaluate_events(events: list[dict], truth: Optional[GroundTruth],
                    theta_amp: float) -> EvalReport:
    """Build an EvalReport.

    eta_mape averages |eta - remaining| / remaining over fault_predicted
    events emitted strictly before the truth crossing at theta_amp; events
    at or past the crossing have no remaining time to predict and are
    skipped. With no applicable predictions the error is reported as 0.
    """
    fault_events = [e for e in events if e.get("kind") in FAULT_KINDS]
    events_total = len(events)

    if truth is None:
        return EvalReport(detected=False, detection_delay=None,
                          false_alarms=len(fault_events), eta_mape=0.0,
                          events_total=events_total)

    detected = bool(fault_events)
    delay = None
    if detected:
        first_t = min(int(e["t"]) for e in fault_events)
        delay = first_t - truth.first_exceed

    crossing = truth_crossing(truth, theta_amp)
    errors = []
    if crossing is not None:
        for e in events:
            if e.get("kind") != "fault_predicted" or "eta" not in e:
                continue
            remaining = crossing - int(e["t"])
            if remaining <= 0:
                continue
            errors.append(abs(float(e["eta"]) - remaining) / remaining)
    eta_mape = float(sum(errors) / len(errors)) if errors else 0.0
    return EvalReport(detected=detected, detection_delay=delay, false_alarms=0,
                      eta_mape=eta_mape, events_total=events_total)
