"""The transfer language on the wire, the bridge, and the HTTP facade.

Run:  python3 demos/04_wire_and_server.py
"""

import json
import socket
import urllib.request

from syntheto.bridge import BridgeClient, serve_bridge
from syntheto.parser import parse_program
from syntheto.service import SessionService
from syntheto.session import SessionConfig
from syntheto.transfer import ast_to_transfer, serialize
from syntheto.webapi import serve_http


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


print("== the wire form of a definition ==")
[unit] = parse_program("subtype positive {\n  x: int | x > 0\n}")
form = serialize(ast_to_transfer(unit))
print(form)

print("\n== a bridge round trip ==")
service = SessionService(SessionConfig(trials=200))
bridge = serve_bridge(service, port=free_port())
client = BridgeClient(port=bridge.server_address[1])
print(f"server greeted with: {client.hello}")
frame_type, payload = client.roundtrip(form)
print(f"{frame_type}: {payload}")
client.close()
bridge.shutdown()

print("\n== the HTTP facade ==")
service = SessionService(SessionConfig(trials=200))
http = serve_http(service, port=free_port())
base = f"http://127.0.0.1:{http.server_address[1]}"

def post(path, body):
    req = urllib.request.Request(
        base + path, data=json.dumps(body).encode(), method="POST",
        headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read().decode())

result = post("/cells", {"source": "struct point { x: int, y: int }"})
print(f"POST /cells -> revision {result['revision']}, "
      f"outcome {result['outcome']['kind']}")
result = post("/cells", {"source": (
    "function norm1(p: point) returns (n: int) { return abs(p.x) + abs(p.y); }")})
print(f"POST /cells -> revision {result['revision']}, "
      f"outcome {result['outcome']['kind']}")

with urllib.request.urlopen(base + "/cells") as resp:
    cells = json.loads(resp.read().decode())
print(f"GET /cells -> {[c['status'] for c in cells['cells']]}")
http.shutdown()
