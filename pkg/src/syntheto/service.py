"""Thread-safe session access shared by the bridge and the HTTP facade.

One writer: every world-mutating operation runs under a single lock, in
submission order, so concurrent clients observe a strictly serial revision
history. Reads take the lock only long enough to copy a snapshot.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterator, Optional

from .lexer import SynthetoError
from .printer import print_toplevel
from .session import (
    BlockedByRejection, Cell, Outcome, SessionConfig, SessionState,
    edit_cell_stream, submit_cell,
)
from .transfer import outcome_to_transfer, serialize


def outcome_view(out: Outcome) -> dict:
    return {
        "kind": out.kind,
        "message": out.message,
        "detail": out.detail,
        "verdicts": [{"obligation": i, "status": s} for i, s in out.verdicts],
        "display": [print_toplevel(u) for u in out.payload],
        "transfer": serialize(
            outcome_to_transfer(out.kind, out.message, out.payload)),
    }


def cell_view(index: int, cell: Cell) -> dict:
    return {
        "index": index,
        "source": cell.source,
        "status": cell.status,
        "outcomes": [outcome_view(o) for o in cell.outcomes],
    }


class SessionService:
    def __init__(self, config: Optional[SessionConfig] = None):
        self._lock = threading.Lock()
        self._session = SessionState(config or SessionConfig())

    # ------------------------------------------------------------- queries

    def session_view(self) -> dict:
        with self._lock:
            s = self._session
            return {"id": s.session_id, "revision": s.revision,
                    "cellCount": len(s.cells)}

    def cells_view(self) -> dict:
        with self._lock:
            s = self._session
            return {"revision": s.revision,
                    "cells": [cell_view(i, c) for i, c in enumerate(s.cells)]}

    def fingerprint(self) -> str:
        with self._lock:
            return self._session.state.fingerprint()

    @property
    def revision(self) -> int:
        with self._lock:
            return self._session.revision

    # ----------------------------------------------------------- mutations

    def submit(self, source: str) -> dict:
        with self._lock:
            s, outcome = submit_cell(self._session, source)
            self._session = s
            index = len(s.cells) - 1
            return {"revision": s.revision,
                    "cell": cell_view(index, s.cells[index]),
                    "outcome": outcome_view(outcome)}

    def edit(self, index: int, source: str) -> Iterator[dict]:
        """Edit and cascade; yields one record per cell as it is re-run. The
        lock covers the whole cascade: edits are atomic to other clients."""
        with self._lock:
            s = self._session
            for i, cell in edit_cell_stream(s, index, source):
                yield {"revision": s.revision, "cell": cell_view(i, cell)}

    def rerun(self, index: int) -> Iterator[dict]:
        with self._lock:
            source = self._session.cells[index].source
        return self.edit(index, source)

    # ------------------------------------------------------- bridge facade

    def submit_form(self, form_text: str) -> str:
        """Execute one wrapped transfer-language command; returns the
        serialized outcome form. Errors become failure outcomes."""
        from .transfer import parse_sexpr, transfer_to_ast, SList, SSym

        try:
            form = parse_sexpr(form_text)
            form = _strip_wrappers(form)
            unit = transfer_to_ast(form)
            source = print_toplevel(unit)
        except SynthetoError as exc:
            return serialize(outcome_to_transfer("failure", str(exc)))
        try:
            result = self.submit(source)
        except BlockedByRejection as exc:
            return serialize(outcome_to_transfer("failure", str(exc)))
        return result["outcome"]["transfer"]


def _strip_wrappers(form):
    """Remove try-in-main-thread / nld execution wrappers."""
    from .transfer import SList, SSym

    while True:
        match form:
            case SList((SSym(_, name), inner)) if name in (
                    "TRY-IN-MAIN-THREAD", "NLD"):
                form = inner
            case _:
                return form
