/** Notebook controller: one in-flight mutation; further runs queue until
 * the current cascade completes, mirroring the server's serialized world. */

import { ApiError, NotebookApi } from "./api.js";
import {
  SessionView, applyCellRecord, applyCells, emptySession, firstRejected,
  markRunning, markStaleFrom,
} from "./model.js";

export type Listener = (view: SessionView, banner: string | null) => void;

export class NotebookController {
  private view: SessionView = emptySession();
  private banner: string | null = null;
  private queue: Promise<void> = Promise.resolve();

  constructor(
    private readonly api: NotebookApi,
    private readonly listener: Listener,
  ) {}

  current(): SessionView {
    return this.view;
  }

  private emit(): void {
    this.listener(this.view, this.banner);
  }

  private set(view: SessionView): void {
    this.view = view;
    this.emit();
  }

  /** Serialize mutations: each runs after the previous cascade finishes. */
  private enqueue(task: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(task, task);
    return this.queue;
  }

  async refresh(): Promise<void> {
    try {
      this.banner = null;
      this.set(applyCells(this.view, await this.api.cells()));
    } catch (err) {
      this.banner = `server unreachable: ${String(err)}`;
      this.view = { ...this.view, connected: false };
      this.emit();
    }
  }

  /** Append a new cell with the given source and run it. */
  appendCell(source: string): Promise<void> {
    return this.enqueue(async () => {
      if (firstRejected(this.view) !== null) {
        this.banner = "fix the rejected cell before adding new ones";
        this.emit();
        return;
      }
      try {
        this.banner = null;
        const result = await this.api.append(source);
        this.set(applyCellRecord(this.view, result));
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          this.banner = err.message;
        } else {
          this.banner = `server unreachable: ${String(err)}`;
        }
        this.emit();
      }
    });
  }

  /** Run cell `index` with the text currently in its editor. An unchanged
   * cell resubmits as-is; a changed one edits and cascades. Blocked while
   * an earlier cell is rejected. */
  runCell(index: number, editorText: string): Promise<void> {
    return this.enqueue(async () => {
      const blocked = firstRejected(this.view);
      if (blocked !== null && blocked < index) {
        this.banner = `cell ${blocked} is rejected; fix it first`;
        this.emit();
        return;
      }
      this.banner = null;
      // downstream panes flip to stale, the edited cell shows running,
      // then every pane refreshes as the server streams outcomes
      this.set(markRunning(markStaleFrom(this.view, index + 1), index));
      try {
        for await (const record of this.api.edit(index, editorText)) {
          this.set(applyCellRecord(this.view, record));
        }
      } catch (err) {
        this.banner = `cascade interrupted: ${String(err)}`;
        this.emit(); // stale badges remain; the run button is the retry
      }
    });
  }
}
