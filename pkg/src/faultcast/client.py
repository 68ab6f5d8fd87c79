"""Async client for the service, used by the CLI.

Without a server URL the client mounts the application in-process over an
ASGI transport, so CLI commands work standalone while exercising exactly
the HTTP surface a remote deployment would.
"""

from __future__ import annotations

from typing import Optional

import httpx


class ServiceError(Exception):
    """HTTP-level failure, carrying the service's error kind."""

    def __init__(self, kind: str, message: str, status: int):
        super().__init__(message)
        self.kind = kind
        self.status = status


class ServiceClient:
    def __init__(self, server: Optional[str] = None, timeout: float = 300.0):
        if server:
            self._client = httpx.AsyncClient(base_url=server.rstrip("/"), timeout=timeout)
        else:
            from .service.app import create_app
            transport = httpx.ASGITransport(app=create_app())
            self._client = httpx.AsyncClient(transport=transport,
                                             base_url="http://faultcast.local",
                                             timeout=timeout)

    async def __aenter__(self) -> "ServiceClient":
        return self

    async def __aexit__(self, *exc) -> None:
        await self.close()

    async def close(self) -> None:
        await self._client.aclose()

    async def _request(self, method: str, path: str, **kw) -> dict:
        resp = await self._client.request(method, path, **kw)
        if resp.status_code >= 400:
            kind, message = "internal", resp.text
            try:
                detail = resp.json().get("detail")
                if isinstance(detail, dict):
                    kind = detail.get("error", kind)
                    message = detail.get("message", message)
            except ValueError:
                pass
            raise ServiceError(kind, message, resp.status_code)
        return resp.json()

    async def health(self) -> dict:
        return await self._request("GET", "/health")

    async def simulate(self, config_text: str, seed: Optional[int] = None) -> dict:
        return await self._request("POST", "/simulate",
                                   json={"config_text": config_text, "seed": seed})

    async def create_session(self, config_text: str, seed: Optional[int] = None) -> str:
        out = await self._request("POST", "/sessions",
                                  json={"config_text": config_text, "seed": seed})
        return out["session_id"]

    async def ingest(self, session_id: str, lines: list[str]) -> dict:
        return await self._request("POST", f"/sessions/{session_id}/ingest",
                                   json={"lines": lines})

    async def session_stats(self, session_id: str) -> dict:
        return await self._request("GET", f"/sessions/{session_id}")

    async def tune(self, session_id: str) -> dict:
        return await self._request("POST", f"/sessions/{session_id}/tune")

    async def close_session(self, session_id: str) -> dict:
        return await self._request("DELETE", f"/sessions/{session_id}")

    async def evaluate(self, events_jsonl: str, truth_json: str, theta_amp: float) -> dict:
        return await self._request("POST", "/eval",
                                   json={"events_jsonl": events_jsonl,
                                         "truth_json": truth_json,
                                         "theta_amp": theta_amp})
