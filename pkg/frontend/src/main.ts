/** DOM bootstrap: editable cells with run buttons, read-only result panes,
 * status badges, and an append box. Monospace, no highlighting. */

import { NotebookApi } from "./api.js";
import { SessionView, firstRejected } from "./model.js";
import { NotebookController } from "./notebook.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8173";

const root = document.getElementById("notebook")!;
const bannerEl = document.getElementById("banner")!;
const api = new NotebookApi(base);

const editors = new Map<number, HTMLTextAreaElement>();

function render(view: SessionView, banner: string | null): void {
  bannerEl.textContent = banner ?? "";
  bannerEl.style.display = banner ? "block" : "none";

  root.textContent = "";
  const blocked = firstRejected(view);
  for (const cell of view.cells) {
    const container = document.createElement("div");
    container.className = `cell cell-${cell.badge}`;

    const head = document.createElement("div");
    head.className = "cell-head";
    const badge = document.createElement("span");
    badge.className = `badge badge-${cell.badge}`;
    badge.textContent = cell.badge;
    const run = document.createElement("button");
    run.textContent = "run";
    const disabled = blocked !== null && blocked < cell.index;
    run.disabled = disabled;
    if (disabled) {
      run.title = `cell ${blocked} is rejected; fix and rerun it first`;
    }
    head.append(`[${cell.index}] `, badge, " ", run);

    const editor = document.createElement("textarea");
    editor.value = editors.get(cell.index)?.value ?? cell.editor;
    editor.rows = Math.max(3, cell.editor.split("\n").length);
    editor.spellcheck = false;
    editors.set(cell.index, editor);

    const pane = document.createElement("pre");
    pane.className = "pane";
    pane.textContent = cell.pane;

    run.addEventListener("click", () => {
      void controller.runCell(cell.index, editor.value);
    });

    container.append(head, editor, pane);
    root.append(container);
  }

  const fresh = document.createElement("div");
  fresh.className = "cell cell-new";
  const editor = document.createElement("textarea");
  editor.rows = 4;
  editor.placeholder = "new definition, theorem, or transform...";
  editor.spellcheck = false;
  const add = document.createElement("button");
  add.textContent = "run new cell";
  add.addEventListener("click", () => {
    const text = editor.value.trim();
    if (text) {
      void controller.appendCell(text).then(() => {
        editor.value = "";
      });
    }
  });
  fresh.append(editor, add);
  root.append(fresh);
}

const controller = new NotebookController(api, render);
void controller.refresh();
