"""JSON-over-HTTP linking service (stdlib server, one index per process)."""
from __future__ import annotations

import json
import logging
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Mapping, Optional

from .config import LinkerConfig
from .index import IndexBundle
from .linker import Linker, LinkRequest, RequestError

log = logging.getLogger(__name__)

MAX_BODY = 16 * 1024 * 1024


class LinkService:
    """Holds the linker once the index is loaded; until then every route answers 503."""

    def __init__(self, config: Optional[LinkerConfig] = None, cli_overrides: Optional[Mapping[str, Any]] = None):
        self.config = config or LinkerConfig()
        self.cli_overrides = dict(cli_overrides or {})
        self.linker: Optional[Linker] = None
        self.load_error: Optional[str] = None
        self._ready = threading.Event()

    @property
    def ready(self) -> bool:
        return self._ready.is_set()

    def set_index(self, index: IndexBundle) -> None:
        self.linker = Linker(index, self.config)
        self._ready.set()

    def load(self, index_dir) -> None:
        try:
            self.set_index(IndexBundle.load(index_dir))
        except Exception as exc:  # surfaced through /health
            log.exception("index load failed")
            self.load_error = str(exc)

    def load_in_background(self, index_dir) -> threading.Thread:
        thread = threading.Thread(target=self.load, args=(index_dir,), daemon=True)
        thread.start()
        return thread

    def health(self):
        if not self.ready:
            body = {"status": "error" if self.load_error else "loading"}
            if self.load_error:
                body["error"] = {"code": "INDEX_LOAD_FAILED", "message": self.load_error}
            return HTTPStatus.SERVICE_UNAVAILABLE, body
        index = self.linker.index
        return HTTPStatus.OK, {
            "status": "ready",
            "indexVersion": index.index_version,
            "resourceCount": index.manifest.get("counts", {}).get("resources", len(index.graph.nodes)),
        }

    def link(self, raw: bytes):
        if not self.ready:
            return HTTPStatus.SERVICE_UNAVAILABLE, _error("INDEX_LOADING", "index is not loaded yet")
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            return HTTPStatus.BAD_REQUEST, _error("BAD_JSON", str(exc))
        try:
            request = LinkRequest.from_json(payload)
            return HTTPStatus.OK, self.linker.handle(request, self.cli_overrides)
        except RequestError as exc:
            return HTTPStatus.BAD_REQUEST, {"error": exc.as_dict()}

    def make_server(self, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
        service = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):
                log.debug("%s - %s", self.address_string(), fmt % args)

            def _send(self, status, body):
                data = json.dumps(body, ensure_ascii=False, sort_keys=True).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                if self.path.split("?", 1)[0] == "/health":
                    self._send(*service.health())
                else:
                    self._send(HTTPStatus.NOT_FOUND, _error("NOT_FOUND", self.path))

            def do_POST(self):
                if self.path.split("?", 1)[0] != "/link":
                    self._send(HTTPStatus.NOT_FOUND, _error("NOT_FOUND", self.path))
                    return
                length = int(self.headers.get("Content-Length") or 0)
                if length > MAX_BODY:
                    self._send(HTTPStatus.REQUEST_ENTITY_TOO_LARGE, _error("TOO_LARGE", "request body too large"))
                    return
                self._send(*service.link(self.rfile.read(length)))

        return ThreadingHTTPServer((host, port), Handler)


def _error(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}
