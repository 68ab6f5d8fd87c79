"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class SimulateRequest(BaseModel):
    config_text: str = ""
    seed: Optional[int] = None


class SimulateResponse(BaseModel):
    csv_text: str
    truth: dict
    total_samples: int


class SessionCreateRequest(BaseModel):
    config_text: str = ""
    seed: Optional[int] = None


class SessionCreateResponse(BaseModel):
    session_id: str


class IngestRequest(BaseModel):
    lines: list[str] = Field(default_factory=list)


class EventModel(BaseModel):
    t: int
    kind: str
    score: float
    eta: Optional[float] = None
    amplitude: Optional[float] = None
    detail: str = ""


class IngestResponse(BaseModel):
    events: list[EventModel]
    accepted: int
    malformed: int


class SessionStatsResponse(BaseModel):
    session_id: str
    phase: str
    frames_seen: int
    svm_points: int
    buffer_len: int
    history_len: int
    pending_samples: int
    rows_accepted: int
    rows_malformed: int
    events_total: int


class TuneResponse(BaseModel):
    c: float
    gamma: float
    cv_accuracy: float


class EvalRequest(BaseModel):
    events_jsonl: str
    truth_json: str
    theta_amp: float = 0.0


class EvalResponse(BaseModel):
    detected: bool
    detection_delay: Optional[int] = None
    false_alarms: int
    eta_mape: float
    events_total: int
