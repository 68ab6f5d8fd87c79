"""HTTP service wrapping the detection engine and simulator.

Sessions hold one engine each and ingest raw CSV rows; every session is
single-writer (guarded by a lock) per the engine's concurrency contract.
Error responses carry {"error": <kind>, "message": ...} so thin clients
can map them onto stable exit codes.
"""

from __future__ import annotations

import json
import threading
import uuid

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import load_config
from ..engine import Engine
from ..errors import ConfigError, FaultcastError, InsufficientDataError
from ..evaluate import evaluate_events
from ..formats import (
    CSV_HEADER,
    parse_sample_line,
    read_events_jsonl,
    sample_line,
    truth_from_json,
    truth_to_json,
)
from ..rig import generate
from .schemas import (
    EvalRequest,
    EvalResponse,
    EventModel,
    HealthResponse,
    IngestRequest,
    IngestResponse,
    SessionCreateRequest,
    SessionCreateResponse,
    SessionStatsResponse,
    SimulateRequest,
    SimulateResponse,
    TuneResponse,
)


class _Session:
    def __init__(self, engine: Engine):
        self.engine = engine
        self.lock = threading.Lock()
        self.rows_accepted = 0
        self.rows_malformed = 0
        self.events_total = 0


def _error(status: int, kind: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"error": kind, "message": message})


def create_app() -> FastAPI:
    app = FastAPI(title="faultcast", version=__version__)
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> _Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise _error(404, "not_found", f"unknown session {session_id}")
        return session

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(version=__version__)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        try:
            bundle = load_config(req.config_text, seed_override=req.seed)
            values, truth = generate(bundle.sim)
        except ConfigError as exc:
            raise _error(400, "config", str(exc))
        lines = [CSV_HEADER]
        lines.extend(sample_line(i, float(v)) for i, v in enumerate(values))
        return SimulateResponse(csv_text="\n".join(lines) + "\n",
                                truth=json.loads(truth_to_json(truth)),
                                total_samples=len(values))

    @app.post("/sessions", response_model=SessionCreateResponse)
    def create_session(req: SessionCreateRequest) -> SessionCreateResponse:
        try:
            bundle = load_config(req.config_text, seed_override=req.seed)
            engine = Engine(bundle.engine)
        except (ConfigError, ValueError) as exc:
            raise _error(400, "config", str(exc))
        session_id = uuid.uuid4().hex
        with registry_lock:
            sessions[session_id] = _Session(engine)
        return SessionCreateResponse(session_id=session_id)

    @app.post("/sessions/{session_id}/ingest", response_model=IngestResponse)
    def ingest(session_id: str, req: IngestRequest) -> IngestResponse:
        session = get_session(session_id)
        out: list[EventModel] = []
        accepted = malformed = 0
        with session.lock:
            engine = session.engine
            for line in req.lines:
                try:
                    t, value = parse_sample_line(line)
                except ValueError:
                    malformed += 1
                    out.append(EventModel(t=max(engine.last_t, 0), kind="stream_error",
                                          score=0.0, detail=f"malformed row skipped: {line!r}"))
                    continue
                accepted += 1
                for ev in engine.ingest(t, value):
                    out.append(EventModel(**ev.to_dict()))
            session.rows_accepted += accepted
            session.rows_malformed += malformed
            session.events_total += len(out)
        return IngestResponse(events=out, accepted=accepted, malformed=malformed)

    @app.get("/sessions/{session_id}", response_model=SessionStatsResponse)
    def session_stats(session_id: str) -> SessionStatsResponse:
        session = get_session(session_id)
        with session.lock:
            stats = session.engine.stats()
            return SessionStatsResponse(
                session_id=session_id,
                phase=stats["phase"],
                frames_seen=stats["frames_seen"],
                svm_points=stats["svm_points"],
                buffer_len=stats["buffer_len"],
                history_len=stats["history_len"],
                pending_samples=stats["pending_samples"],
                rows_accepted=session.rows_accepted,
                rows_malformed=session.rows_malformed,
                events_total=session.events_total,
            )

    @app.post("/sessions/{session_id}/tune", response_model=TuneResponse)
    def tune(session_id: str) -> TuneResponse:
        session = get_session(session_id)
        with session.lock:
            try:
                result = session.engine.tune_now()
            except InsufficientDataError as exc:
                raise _error(409, "insufficient_data", str(exc))
            except FaultcastError as exc:
                raise _error(400, "config", str(exc))
        return TuneResponse(c=result.c, gamma=result.gamma, cv_accuracy=result.cv_accuracy)

    @app.delete("/sessions/{session_id}", response_model=SessionStatsResponse)
    def close_session(session_id: str) -> SessionStatsResponse:
        stats = session_stats(session_id)
        with registry_lock:
            sessions.pop(session_id, None)
        return stats

    @app.post("/eval", response_model=EvalResponse)
    def eval_events(req: EvalRequest) -> EvalResponse:
        try:
            events = read_events_jsonl(req.events_jsonl)
            truth = truth_from_json(req.truth_json)
        except ValueError as exc:
            raise _error(400, "parse", str(exc))
        if req.theta_amp < 0:
            raise _error(400, "config", "theta_amp must be >= 0")
        report = evaluate_events(events, truth, req.theta_amp)
        return EvalResponse(**report.to_dict())

    return app


app = create_app()
