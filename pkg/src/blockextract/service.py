"""Minimal JSON-over-HTTP service exposing the extraction pipeline.

POST /extract  {"html": ..., "query"?: ..., "format"?: "html|markdown|text"}
               -> {"content": ..., "indices": [[lo,hi],...], "stats": {...}}
POST /segment  {"html": ...} -> indexed block lines (text/plain)
GET  /healthz  -> "ok"

Errors: 400 malformed JSON/fields, 413 body over the size cap, 502 backend
failure.  Each request runs a fresh stateless pipeline pass; a fixed backend
can be injected (tests do), otherwise one is built per request from config.
"""

from __future__ import annotations

import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .extractor import BackendUnavailable, ExtractorBackend, Query
from .pipeline import PipelineConfig, build_backend, extract, load_template, segment_html
from .render import OutputFormat
from .segmenter import render_indexed

log = logging.getLogger(__name__)

DEFAULT_MAX_BODY_BYTES = 16 * 1024 * 1024


class _BadRequest(Exception):
    pass


class ExtractionServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        address: tuple[str, int],
        config: PipelineConfig | None = None,
        backend: ExtractorBackend | None = None,
        max_body_bytes: int = DEFAULT_MAX_BODY_BYTES,
    ):
        super().__init__(address, _Handler)
        self.config = config or PipelineConfig()
        self.backend = backend
        self.max_body_bytes = max_body_bytes
        self.template = load_template(self.config)


class _Handler(BaseHTTPRequestHandler):
    server: ExtractionServer
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        log.debug("%s - %s", self.address_string(), fmt % args)

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: dict) -> None:
        self._send(status, json.dumps(payload).encode("utf-8"), "application/json; charset=utf-8")

    def _send_error_json(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def do_GET(self):
        if self.path == "/healthz":
            self._send(200, b"ok", "text/plain; charset=utf-8")
        else:
            self._send_error_json(404, "not found")

    def _read_payload(self) -> dict:
        length = self.headers.get("Content-Length")
        if length is None or not length.isdigit():
            raise _BadRequest("Content-Length required")
        size = int(length)
        if size > self.server.max_body_bytes:
            self.close_connection = True
            self._send_error_json(413, f"body over {self.server.max_body_bytes} bytes")
            raise _Responded()
        body = self.rfile.read(size)
        try:
            payload = json.loads(body.decode("utf-8", errors="replace"))
        except json.JSONDecodeError as exc:
            raise _BadRequest(f"malformed JSON: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("html"), str):
            raise _BadRequest('JSON object with an "html" string field required')
        for field in ("query", "format", "url"):
            if field in payload and payload[field] is not None and not isinstance(payload[field], str):
                raise _BadRequest(f'"{field}" must be a string')
        return payload

    def do_POST(self):
        try:
            payload = self._read_payload()
        except _Responded:
            return
        except _BadRequest as exc:
            self._send_error_json(400, str(exc))
            return

        try:
            if self.path == "/extract":
                self._handle_extract(payload)
            elif self.path == "/segment":
                self._handle_segment(payload)
            else:
                self._send_error_json(404, "not found")
        except Exception:
            log.exception("unhandled error serving %s", self.path)
            self._send_error_json(500, "internal error")

    def _handle_extract(self, payload: dict) -> None:
        config = self.server.config
        fmt_name = payload.get("format")
        if fmt_name is not None:
            try:
                fmt = OutputFormat(fmt_name)
            except ValueError:
                self._send_error_json(400, f"unknown format {fmt_name!r}")
                return
        else:
            fmt = config.format
        from dataclasses import replace

        config = replace(config, format=fmt)
        query = Query.make(payload.get("query"))
        backend = self.server.backend or build_backend(config, query, self.server.template)
        try:
            result = extract(
                payload["html"], query, config,
                backend=backend, url=str(payload.get("url", "")),
                tmpl=self.server.template,
            )
        except BackendUnavailable as exc:
            self._send_error_json(502, f"backend unavailable: {exc}")
            return
        self._send_json(200, {
            "content": result.content,
            "indices": result.indices.to_list(),
            "stats": {
                "blocks": result.stats.blocks,
                "chunks": result.stats.chunks,
                "latency_ms": round(result.stats.latency_ms, 3),
            },
        })

    def _handle_segment(self, payload: dict) -> None:
        seq = segment_html(payload["html"], self.server.config, url=str(payload.get("url", "")))
        body = render_indexed(seq).encode("utf-8")
        self._send(200, body, "text/plain; charset=utf-8")


class _Responded(Exception):
    pass


def serve(bind: str, config: PipelineConfig | None = None,
          max_body_bytes: int = DEFAULT_MAX_BODY_BYTES) -> None:
    """Run the service until interrupted; ``bind`` is ``host:port``."""
    host, _, port = bind.rpartition(":")
    server = ExtractionServer((host or "127.0.0.1", int(port)), config,
                              max_body_bytes=max_body_bytes)
    log.info("serving on %s:%s", *server.server_address)
    try:
        server.serve_forever()
    finally:
        server.server_close()
