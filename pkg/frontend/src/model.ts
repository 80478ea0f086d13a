/** Notebook view state. Result panes and badges are renderings of server
 * responses; the only local transitions are the transient "running" badge
 * and the stale-flip at the start of an edit cascade. */

import type { CascadeRecord, CellsPayload, Outcome, ServerCell } from "./api.js";

export type Badge = "accepted" | "rejected" | "stale" | "running" | "unsubmitted";

export interface CellView {
  index: number;
  /** editable source text */
  editor: string;
  /** read-only result pane beneath the cell */
  pane: string;
  badge: Badge;
}

export interface SessionView {
  cells: CellView[];
  revision: number;
  connected: boolean;
}

export function emptySession(): SessionView {
  return { cells: [], revision: 0, connected: false };
}

/** Pane text for a cell's outcomes: derived definitions verbatim when
 * present (their text is character-identical to the batch driver's
 * back-translation), otherwise the success message or the diagnostic. */
export function paneText(outcomes: Outcome[]): string {
  const parts: string[] = [];
  for (const o of outcomes) {
    if (o.display.length > 0) {
      parts.push(o.display.join("\n"));
    } else if (o.kind === "failure") {
      parts.push(o.detail ? `${o.message}: ${o.detail}` : o.message);
    } else {
      parts.push(o.message);
    }
  }
  return parts.join("\n");
}

export function fromServerCell(cell: ServerCell): CellView {
  return {
    index: cell.index,
    editor: cell.source,
    pane: paneText(cell.outcomes),
    badge: cell.status,
  };
}

export function applyCells(view: SessionView, payload: CellsPayload): SessionView {
  return {
    cells: payload.cells.map(fromServerCell),
    revision: payload.revision,
    connected: true,
  };
}

export function applyCellRecord(view: SessionView, record: CascadeRecord): SessionView {
  const cells = view.cells.slice();
  const fresh = fromServerCell(record.cell);
  if (record.cell.index < cells.length) {
    cells[record.cell.index] = fresh;
  } else {
    cells.push(fresh);
  }
  return { cells, revision: record.revision, connected: true };
}

/** Flip every pane at or after `from` to stale ahead of a cascade. */
export function markStaleFrom(view: SessionView, from: number): SessionView {
  return {
    ...view,
    cells: view.cells.map((c) =>
      c.index >= from ? { ...c, badge: "stale" } : c,
    ),
  };
}

export function markRunning(view: SessionView, index: number): SessionView {
  return {
    ...view,
    cells: view.cells.map((c) =>
      c.index === index ? { ...c, badge: "running" } : c,
    ),
  };
}

/** Index of the first rejected cell, or null; appends and runs are blocked
 * while one exists (the server enforces the same rule). */
export function firstRejected(view: SessionView): number | null {
  for (const c of view.cells) {
    if (c.badge === "rejected") return c.index;
  }
  return null;
}
