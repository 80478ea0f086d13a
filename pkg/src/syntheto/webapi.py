"""HTTP/JSON facade over a session, for the notebook client.

    GET  /session        -> {id, revision, cellCount}
    GET  /cells          -> {revision, cells: [...]}
    POST /cells          -> append + run; JSON result
    PUT  /cells/{i}      -> edit + cascade; streams one JSON line per cell
                            (chunked transfer encoding)
    POST /cells/{i}/run  -> resubmit cell i and cascade; same stream

Payload strings embed canonical transfer-language text alongside printed
surface syntax. Responses carry permissive CORS headers so a browser
client served from elsewhere can talk to the facade.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from .lexer import SynthetoError
from .service import SessionService
from .session import BlockedByRejection

_CELL_PATH = re.compile(r"^/cells/(\d+)(/run)?$")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "syntheto-notebook/1"

    def log_message(self, fmt, *args):  # tests stay quiet
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    @property
    def service(self) -> SessionService:
        return self.server.service

    # ------------------------------------------------------------- plumbing

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods",
                         "GET, POST, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _json(self, status: int, obj) -> None:
        body = json.dumps(obj).encode()
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length) if length else b"{}"
        try:
            obj = json.loads(raw.decode())
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise ValueError("request body must be JSON")
        if not isinstance(obj, dict):
            raise ValueError("request body must be a JSON object")
        return obj

    def _stream(self, records) -> None:
        """Chunked application/x-ndjson: one JSON object per line."""
        self.send_response(200)
        self._cors()
        self.send_header("Content-Type", "application/x-ndjson")
        self.send_header("Transfer-Encoding", "chunked")
        self.end_headers()
        try:
            for record in records:
                chunk = (json.dumps(record) + "\n").encode()
                self.wfile.write(f"{len(chunk):x}\r\n".encode())
                self.wfile.write(chunk)
                self.wfile.write(b"\r\n")
                self.wfile.flush()
        finally:
            self.wfile.write(b"0\r\n\r\n")

    # ------------------------------------------------------------- handlers

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        if self.path == "/session":
            self._json(200, self.service.session_view())
            return
        if self.path == "/cells":
            self._json(200, self.service.cells_view())
            return
        self._json(404, {"error": f"no resource {self.path}"})

    def do_POST(self) -> None:
        m = _CELL_PATH.match(self.path)
        if m and m.group(2):
            index = int(m.group(1))
            try:
                self._stream(self.service.rerun(index))
            except (SynthetoError, IndexError) as exc:
                self._json(400, {"error": str(exc)})
            return
        if self.path == "/cells":
            try:
                body = self._read_body()
                result = self.service.submit(str(body.get("source", "")))
                self._json(200, result)
            except BlockedByRejection as exc:
                self._json(409, {"error": str(exc)})
            except (SynthetoError, ValueError) as exc:
                self._json(400, {"error": str(exc)})
            return
        self._json(404, {"error": f"no resource {self.path}"})

    def do_PUT(self) -> None:
        m = _CELL_PATH.match(self.path)
        if m and not m.group(2):
            index = int(m.group(1))
            try:
                body = self._read_body()
                records = self.service.edit(index, str(body.get("source", "")))
                self._stream(records)
            except (SynthetoError, ValueError) as exc:
                self._json(400, {"error": str(exc)})
            return
        self._json(404, {"error": f"no resource {self.path}"})


class NotebookServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, service: SessionService, verbose=False):
        super().__init__(address, _Handler)
        self.service = service
        self.verbose = verbose


def serve_http(service: SessionService, host: str = "127.0.0.1",
               port: int = 8173, verbose: bool = False) -> NotebookServer:
    """Start the facade in a background thread; returns the server."""
    server = NotebookServer((host, port), service, verbose)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
