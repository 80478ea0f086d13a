"""Socket bridge carrying framed transfer-language commands.

Frame format (documented in docs/protocol.md):

    TYPE LENGTH\\n  followed by LENGTH payload bytes, followed by \\n

with TYPE one of HELLO, LISP, RETURN, ERROR. The server greets each
connection with a HELLO frame. A LISP frame carries one wrapped command;
the reply is a RETURN frame with the outcome form. Execution wrappers
(try-in-main-thread, nld) are honored and stripped; all world-mutating
commands execute strictly serialized. Malformed frames produce an ERROR
frame and the connection stays open.
"""

from __future__ import annotations

import socket
import socketserver
import threading
from typing import Optional

from .service import SessionService

FRAME_TYPES = ("HELLO", "LISP", "RETURN", "ERROR")
HELLO_PAYLOAD = b"syntheto bridge 1"
MAX_FRAME = 16 * 1024 * 1024


class FrameError(Exception):
    pass


def write_frame(wfile, frame_type: str, payload: bytes) -> None:
    assert frame_type in FRAME_TYPES
    wfile.write(f"{frame_type} {len(payload)}\n".encode("ascii"))
    wfile.write(payload)
    wfile.write(b"\n")
    wfile.flush()


def read_frame(rfile) -> Optional[tuple[str, bytes]]:
    """One frame, or None at EOF. Raises FrameError on malformed input."""
    header = rfile.readline()
    if not header:
        return None
    try:
        text = header.decode("ascii").strip()
        frame_type, length_s = text.split(" ", 1)
        length = int(length_s)
    except (UnicodeDecodeError, ValueError):
        raise FrameError(f"malformed frame header {header!r}") from None
    if frame_type not in FRAME_TYPES:
        raise FrameError(f"unknown frame type {frame_type!r}")
    if not (0 <= length <= MAX_FRAME):
        raise FrameError(f"bad frame length {length}")
    payload = rfile.read(length)
    if len(payload) != length:
        raise FrameError("truncated frame payload")
    terminator = rfile.read(1)
    if terminator != b"\n":
        raise FrameError("missing frame terminator")
    return frame_type, payload


class _BridgeHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        service: SessionService = self.server.service
        write_frame(self.wfile, "HELLO", HELLO_PAYLOAD)
        while True:
            try:
                frame = read_frame(self.rfile)
            except FrameError as exc:
                try:
                    write_frame(self.wfile, "ERROR", str(exc).encode())
                    continue
                except (BrokenPipeError, ConnectionError):
                    return
            except (ConnectionError, OSError):
                return
            if frame is None:
                return
            frame_type, payload = frame
            if frame_type != "LISP":
                write_frame(self.wfile, "ERROR",
                            f"expected a LISP frame, got {frame_type}".encode())
                continue
            reply = service.submit_form(payload.decode("latin-1"))
            write_frame(self.wfile, "RETURN", reply.encode("latin-1"))


class BridgeServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, service: SessionService):
        super().__init__(address, _BridgeHandler)
        self.service = service


def serve_bridge(service: SessionService, host: str = "127.0.0.1",
                 port: int = 55433) -> BridgeServer:
    """Start the bridge in a background thread; returns the server."""
    server = BridgeServer((host, port), service)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


class BridgeClient:
    """Minimal client used by the CLI and the tests."""

    def __init__(self, host: str = "127.0.0.1", port: int = 55433):
        self.sock = socket.create_connection((host, port))
        self.rfile = self.sock.makefile("rb")
        self.wfile = self.sock.makefile("wb")
        self.hello = read_frame(self.rfile)

    def roundtrip(self, form_text: str) -> tuple[str, str]:
        write_frame(self.wfile, "LISP", form_text.encode("latin-1"))
        frame = read_frame(self.rfile)
        if frame is None:
            raise FrameError("connection closed")
        frame_type, payload = frame
        return frame_type, payload.decode("latin-1")

    def send_raw(self, data: bytes) -> tuple[str, str]:
        self.wfile.write(data)
        self.wfile.flush()
        frame = read_frame(self.rfile)
        if frame is None:
            raise FrameError("connection closed")
        return frame[0], frame[1].decode("latin-1")

    def close(self) -> None:
        self.sock.close()
