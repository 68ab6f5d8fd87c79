"""Command-line frontend; a thin client over the HTTP service.

Commands run against an in-process service by default, or a remote one via
--server. Exit codes are a stable API: 0 ok, 2 config/parse error, 3 I/O
failure, 4 corrupt stream (>10% malformed rows), 5 insufficient data.

Calibration assumes the FIRST engine.calib_frames frames of the stream are
healthy; point `run` at data whose beginning is known good.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

from .client import ServiceClient, ServiceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CORRUPT = 4
EXIT_INSUFFICIENT = 5

_ERROR_EXIT = {
    "config": EXIT_CONFIG,
    "parse": EXIT_CONFIG,
    "insufficient_data": EXIT_INSUFFICIENT,
    "not_found": EXIT_IO,
    "internal": EXIT_CONFIG,
}

CHUNK_LINES = 16384


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _service_exit(exc: ServiceError) -> int:
    return _fail(exc.args[0] if exc.args else exc.kind, _ERROR_EXIT.get(exc.kind, EXIT_CONFIG))


async def cmd_simulate(args) -> int:
    try:
        config_text = _read_text(args.config) if args.config else ""
    except OSError as exc:
        return _fail(f"cannot read config: {exc}", EXIT_IO)
    async with ServiceClient(args.server) as client:
        try:
            out = await client.simulate(config_text, args.seed)
        except ServiceError as exc:
            return _service_exit(exc)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out["csv_text"])
        if args.truth:
            with open(args.truth, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(out["truth"]) + "\n")
    except OSError as exc:
        return _fail(f"cannot write output: {exc}", EXIT_IO)
    print(f"wrote {out['total_samples']} samples to {args.out}")
    return EXIT_OK


async def cmd_run(args) -> int:
    from .formats import event_json_line, iter_csv_lines

    try:
        config_text = _read_text(args.config) if args.config else ""
    except OSError as exc:
        return _fail(f"cannot read config: {exc}", EXIT_IO)
    accepted = malformed = events_n = 0
    async with ServiceClient(args.server) as client:
        try:
            session = await client.create_session(config_text, args.seed)
        except ServiceError as exc:
            return _service_exit(exc)
        try:
            with open(args.events, "w", encoding="utf-8") as out_fh:
                try:
                    for chunk in iter_csv_lines(args.inp, CHUNK_LINES):
                        res = await client.ingest(session, chunk)
                        accepted += res["accepted"]
                        malformed += res["malformed"]
                        for ev in res["events"]:
                            line = {k: v for k, v in ev.items() if v is not None}
                            out_fh.write(event_json_line(line) + "\n")
                            events_n += 1
                except OSError as exc:
                    return _fail(f"cannot read stream: {exc}", EXIT_IO)
                except ServiceError as exc:
                    return _service_exit(exc)
        except OSError as exc:
            return _fail(f"cannot write events: {exc}", EXIT_IO)
        finally:
            try:
                await client.close_session(session)
            except ServiceError:
                pass
    total = accepted + malformed
    print(f"processed {total} rows ({malformed} malformed), {events_n} events -> {args.events}")
    if total > 0 and malformed > 0.10 * total:
        return _fail(f"{malformed}/{total} rows malformed", EXIT_CORRUPT)
    return EXIT_OK


async def cmd_eval(args) -> int:
    try:
        events_text = _read_text(args.events)
        truth_text = _read_text(args.truth)
    except OSError as exc:
        return _fail(f"cannot read input: {exc}", EXIT_IO)
    async with ServiceClient(args.server) as client:
        try:
            report = await client.evaluate(events_text, truth_text, args.theta_amp)
        except ServiceError as exc:
            return _service_exit(exc)
    print(json.dumps({k: v for k, v in report.items() if v is not None}))
    return EXIT_OK


async def cmd_tune(args) -> int:
    from .formats import iter_csv_lines

    try:
        config_text = _read_text(args.config) if args.config else ""
    except OSError as exc:
        return _fail(f"cannot read config: {exc}", EXIT_IO)
    async with ServiceClient(args.server) as client:
        try:
            session = await client.create_session(config_text, args.seed)
        except ServiceError as exc:
            return _service_exit(exc)
        try:
            try:
                for chunk in iter_csv_lines(args.inp, CHUNK_LINES):
                    await client.ingest(session, chunk)
            except OSError as exc:
                return _fail(f"cannot read stream: {exc}", EXIT_IO)
            try:
                result = await client.tune(session)
            except ServiceError as exc:
                return _service_exit(exc)
        finally:
            try:
                await client.close_session(session)
            except ServiceError:
                pass
    print(json.dumps(result))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faultcast",
        description="Streaming unsupervised fault prediction over simulated "
                    "or recorded sensor streams.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a sensor stream and its ground truth")
    p_sim.add_argument("--config", help="config file (key = value lines)")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.add_argument("--truth", help="output ground-truth JSON path")
    p_sim.add_argument("--seed", type=int, help="override the config seed")
    p_sim.add_argument("--server", help="remote service URL (default: in-process)")

    p_run = sub.add_parser(
        "run", help="stream a CSV through the engine, write events JSONL",
        description="Stream a recorded CSV through the detection engine. "
                    "IMPORTANT: the first engine.calib_frames frames are assumed "
                    "fault-free; they fit the map, freeze normalization, and set "
                    "the pseudo-label threshold. Feed data whose beginning is "
                    "known healthy.")
    p_run.add_argument("--config", help="config file")
    p_run.add_argument("--in", dest="inp", required=True, help="input CSV path")
    p_run.add_argument("--events", required=True, help="output events JSONL path")
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.add_argument("--server", help="remote service URL")

    p_eval = sub.add_parser("eval", help="score an event stream against ground truth")
    p_eval.add_argument("--events", required=True, help="events JSONL path")
    p_eval.add_argument("--truth", required=True, help="ground-truth JSON path")
    p_eval.add_argument("--theta-amp", type=float, default=0.0,
                        help="echo amplitude defining the reference fault time")
    p_eval.add_argument("--server", help="remote service URL")

    p_tune = sub.add_parser("tune", help="run the stream, then grid-search hyperparameters")
    p_tune.add_argument("--config", help="config file")
    p_tune.add_argument("--in", dest="inp", required=True, help="input CSV path")
    p_tune.add_argument("--seed", type=int, help="override the config seed")
    p_tune.add_argument("--server", help="remote service URL")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    handler = {
        "simulate": cmd_simulate,
        "run": cmd_run,
        "eval": cmd_eval,
        "tune": cmd_tune,
    }[args.command]
    return asyncio.run(handler(args))


if __name__ == "__main__":
    sys.exit(main())
