"""On-disk formats: sample CSV, event JSON Lines, ground-truth JSON.

Sample values are written with repr(), the shortest decimal that
round-trips to the same float, so a write/read cycle is lossless and
repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator, Optional

from .rig import GroundTruth

CSV_HEADER = "t,value"


def sample_line(t: int, value: float) -> str:
    return f"{t},{value!r}"


def write_samples_csv(path, values: Iterable[float], start_t: int = 0) -> int:
    """Stream samples to CSV; returns the number of rows written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for i, v in enumerate(values):
            fh.write(sample_line(start_t + i, float(v)) + "\n")
            n += 1
    return n


def parse_sample_line(line: str) -> tuple[int, float]:
    """Parse one `t,value` row; raises ValueError on malformed input."""
    left, _, right = line.partition(",")
    if not right:
        raise ValueError(f"not a sample row: {line!r}")
    t = int(left)
    if t < 0:
        raise ValueError(f"negative sample index: {line!r}")
    value = float(right)
    return t, value


def iter_csv_lines(path, chunk_lines: int = 16384) -> Iterator[list[str]]:
    """Yield raw data lines in chunks, consuming the header if present."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        chunk: list[str] = []
        if first and first.strip() and first.strip() != CSV_HEADER:
            chunk.append(first.rstrip("\n"))
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            chunk.append(line)
            if len(chunk) >= chunk_lines:
                yield chunk
                chunk = []
        if chunk:
            yield chunk


def event_json_line(event: dict) -> str:
    return json.dumps(event, allow_nan=False)


def write_events_jsonl(path, events: Iterable[dict]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(event_json_line(ev) + "\n")
            n += 1
    return n


def read_events_jsonl(text: str) -> list[dict]:
    """Parse JSON Lines event text; raises ValueError on a bad line."""
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"events line {lineno} is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "t" not in obj or "kind" not in obj:
            raise ValueError(f"events line {lineno} is not an event object")
        events.append(obj)
    return events


def truth_to_json(truth: Optional[GroundTruth]) -> str:
    if truth is None:
        return "{}"
    return json.dumps({
        "fault_onset": truth.fault_onset,
        "ramp": truth.ramp,
        "echo_amp_max": truth.echo_amp_max,
        "first_exceed": truth.first_exceed,
    })


def truth_from_json(text: str) -> Optional[GroundTruth]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"truth file is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError("truth file must contain a JSON object")
    if not obj:
        return None
    try:
        return GroundTruth(
            fault_onset=int(obj["fault_onset"]),
            ramp=int(obj["ramp"]),
            echo_amp_max=float(obj["echo_amp_max"]),
            first_exceed=int(obj["first_exceed"]),
        )
    except KeyError as exc:
        raise ValueError(f"truth file is missing key {exc}") from exc
