"""Batch driver and server launcher.

    syntheto run FILE [--emit-transfer] [--trials N] [--size N] [--seed S]
                      [--json]
    syntheto serve [--port P] [--http-port H] [--no-bridge]

Exit codes: 0 every cell accepted and every obligation verdict passed;
1 a cell was rejected or a verdict did not pass; 2 usage or I/O error.
SYNTHETO_SEED sets the default oracle seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .lexer import SynthetoError
from .oracle import DEFAULT_SEED, DEFAULT_SIZE, DEFAULT_TRIALS
from .printer import print_toplevel
from .session import (
    SessionConfig, SessionState, cells_of_source, load_notebook, submit_cell,
)
from .transfer import ast_to_transfer, serialize
from .parser import parse_program

REPORT_VERSION = 1


def _default_seed() -> int:
    raw = os.environ.get("SYNTHETO_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError:
        return DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="syntheto")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a .synth file end to end")
    run.add_argument("path")
    run.add_argument("--emit-transfer", action="store_true",
                     help="print the wire form of each accepted unit")
    run.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    run.add_argument("--size", type=int, default=DEFAULT_SIZE)
    run.add_argument("--seed", type=lambda s: int(s, 0),
                     default=_default_seed())
    run.add_argument("--json", action="store_true",
                     help="machine-readable report on stdout")

    serve = sub.add_parser("serve", help="run the bridge and HTTP servers")
    serve.add_argument("--port", type=int, default=None,
                       help="bridge socket port (default 55433)")
    serve.add_argument("--http-port", type=int, default=None,
                       help="HTTP facade port (default 8173); given alone,"
                            " the bridge is disabled")
    serve.add_argument("--no-bridge", action="store_true",
                       help="serve HTTP only")
    serve.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    serve.add_argument("--seed", type=lambda s: int(s, 0),
                       default=_default_seed())
    return p


def run_file(path: str, trials: int, size: int, seed: int,
             emit_transfer: bool = False, as_json: bool = False,
             out=None) -> int:
    if out is None:
        out = sys.stdout
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    config = SessionConfig(trials=trials, size=size, seed=seed)
    try:
        if "/* ---- cell ---- */" in text:
            cells = load_notebook(text)
        else:
            cells = cells_of_source(text)
    except SynthetoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    session = SessionState(config)
    report_cells = []
    all_pass = True
    for i, source in enumerate(cells):
        session, outcome = submit_cell(session, source)
        cell = session.cells[-1]
        report_cells.append({
            "index": i,
            "status": cell.status,
            "outcomes": [{
                "kind": o.kind, "message": o.message, "detail": o.detail,
                "verdicts": [{"obligation": ob, "status": st}
                             for ob, st in o.verdicts],
            } for o in cell.outcomes],
        })
        for o in cell.outcomes:
            if any(st != "pass" for _, st in o.verdicts):
                all_pass = False
        if not as_json:
            status = "ok" if outcome.ok else "REJECTED"
            print(f"[{i}] {status:8} {outcome.kind:22} {outcome.message}",
                  file=out)
            if outcome.detail and not outcome.ok:
                print(f"    {outcome.detail}", file=out)
            for u in outcome.payload:
                print(print_toplevel(u), file=out)
            if emit_transfer and outcome.ok:
                for unit in parse_program(source):
                    print(serialize(ast_to_transfer(unit)), file=out)
        if not outcome.ok:
            # later cells are never submitted; report them as stale
            for j in range(i + 1, len(cells)):
                report_cells.append({"index": j, "status": "stale",
                                     "outcomes": []})
            break

    accepted = all(c.status == "accepted" for c in session.cells)
    exit_code = 0 if (accepted and all_pass) else 1
    if as_json:
        print(json.dumps({
            "version": REPORT_VERSION,
            "file": path,
            "cells": report_cells,
            "exit": exit_code,
            "world": session.state.fingerprint(),
        }, indent=2), file=out)
    return exit_code


def serve_cmd(port, http_port, no_bridge: bool,
              trials: int, seed: int) -> int:
    from .bridge import serve_bridge
    from .service import SessionService
    from .webapi import serve_http

    # --http-port alone serves HTTP only; --port re-enables the bridge
    if http_port is not None and port is None:
        no_bridge = True
    port = 55433 if port is None else port
    http_port = 8173 if http_port is None else http_port
    service = SessionService(SessionConfig(trials=trials, seed=seed))
    try:
        http_server = serve_http(service, port=http_port, verbose=True)
    except OSError as exc:
        print(f"error: cannot bind HTTP port {http_port}: {exc}",
              file=sys.stderr)
        return 2
    bridge_server = None
    if not no_bridge:
        try:
            bridge_server = serve_bridge(service, port=port)
        except OSError as exc:
            print(f"error: cannot bind bridge port {port}: {exc}",
                  file=sys.stderr)
            http_server.shutdown()
            return 2
    print(f"HTTP facade on http://127.0.0.1:{http_port}"
          + ("" if no_bridge else f", bridge on port {port}"))
    try:
        import threading
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        http_server.shutdown()
        if bridge_server is not None:
            bridge_server.shutdown()
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run_file(args.path, args.trials, args.size, args.seed,
                        emit_transfer=args.emit_transfer, as_json=args.json)
    return serve_cmd(args.port, args.http_port, args.no_bridge,
                     args.trials, args.seed)


if __name__ == "__main__":
    sys.exit(main())
