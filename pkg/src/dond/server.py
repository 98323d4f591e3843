"""Threaded HTTP wrapper around the JSON API, with optional static assets."""

from __future__ import annotations

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .api import handle_request

MAX_BODY_BYTES = 4 * 1024 * 1024


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "dond"
    # set by make_server
    static_root: Path | None = None
    quiet = True

    def log_message(self, fmt, *args):  # pragma: no cover - logging plumbing
        if not self.quiet:
            super().log_message(fmt, *args)

    def _send_json(self, status: int, payload: dict) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _dispatch(self, method: str) -> None:
        path = self.path.split("?", 1)[0]
        if path.startswith("/api/"):
            length = int(self.headers.get("Content-Length") or 0)
            if length > MAX_BODY_BYTES:
                self._send_json(413, {"error": {"code": "too_large", "message": "request body too large"}})
                return
            body = self.rfile.read(length) if length else b""
            status, payload = handle_request(method, path, body)
            self._send_json(status, payload)
            return
        if method == "GET" and self.static_root is not None:
            self._send_static(path)
            return
        self._send_json(404, {"error": {"code": "not_found", "message": f"no such endpoint: {path}"}})

    def _send_static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        target = (self.static_root / rel).resolve()
        if not str(target).startswith(str(self.static_root.resolve())) or not target.is_file():
            self.send_error(404, "not found")
            return
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")


def make_server(port: int, static_dir: str | Path | None = None, quiet: bool = True) -> ThreadingHTTPServer:
    """Build (but do not start) the API server; port 0 picks a free port."""

    class Handler(ApiHandler):
        pass

    Handler.static_root = Path(static_dir) if static_dir is not None else None
    Handler.quiet = quiet
    return ThreadingHTTPServer(("127.0.0.1", port), Handler)


def serve_forever(port: int, static_dir: str | Path | None = None) -> None:  # pragma: no cover
    server = make_server(port, static_dir, quiet=False)
    host, actual_port = server.server_address[:2]
    print(f"serving on http://{host}:{actual_port}/ (Ctrl-C to stop)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
