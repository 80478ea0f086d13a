import { describe, expect, it } from "vitest";

import { ApiError, NotebookApi, ndjson } from "../src/api.js";
import { NotebookController } from "../src/notebook.js";
import type { SessionView } from "../src/model.js";

function streamOf(lines: string[], chunkSize = 7): ReadableStream<Uint8Array> {
  const text = lines.map((l) => l + "\n").join("");
  const bytes = new TextEncoder().encode(text);
  let offset = 0;
  return new ReadableStream({
    pull(controller) {
      if (offset >= bytes.length) {
        controller.close();
        return;
      }
      controller.enqueue(bytes.slice(offset, offset + chunkSize));
      offset += chunkSize;
    },
  });
}

describe("ndjson", () => {
  it("reassembles records across chunk boundaries", async () => {
    const records = [{ a: 1 }, { b: "two words" }, { c: [3, 4] }];
    const out: unknown[] = [];
    for await (const r of ndjson(streamOf(records.map((r) => JSON.stringify(r))))) {
      out.push(r);
    }
    expect(out).toEqual(records);
  });

  it("handles a missing trailing newline", async () => {
    const body = streamOf([]);
    const out: unknown[] = [];
    for await (const r of ndjson(body)) out.push(r);
    expect(out).toEqual([]);
  });
});

function fakeFetch(routes: Record<string, (init?: RequestInit) => Response>) {
  return (async (url: RequestInfo | URL, init?: RequestInit) => {
    const key = `${init?.method ?? "GET"} ${String(url)}`;
    const handler = routes[key];
    if (!handler) throw new Error(`no route for ${key}`);
    return handler(init);
  }) as typeof fetch;
}

function jsonResponse(obj: unknown, status = 200): Response {
  return new Response(JSON.stringify(obj), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("NotebookApi", () => {
  it("raises ApiError with the server message", async () => {
    const api = new NotebookApi("http://x", fakeFetch({
      "POST http://x/cells": () =>
        jsonResponse({ error: "a rejected cell blocks appends" }, 409),
    }));
    await expect(api.append("struct s { a: int }")).rejects.toMatchObject({
      status: 409,
      message: "a rejected cell blocks appends",
    });
  });

  it("streams cascade records from an edit", async () => {
    const records = [0, 1, 2].map((i) => ({
      revision: 9,
      cell: { index: i, source: "s", status: "accepted", outcomes: [] },
    }));
    const api = new NotebookApi("http://x", fakeFetch({
      "PUT http://x/cells/0": () =>
        new Response(streamOf(records.map((r) => JSON.stringify(r)))),
    }));
    const seen: number[] = [];
    for await (const r of api.edit(0, "s")) seen.push(r.cell.index);
    expect(seen).toEqual([0, 1, 2]);
  });
});

describe("NotebookController queueing", () => {
  it("serializes mutations: a second run waits for the first cascade", async () => {
    const order: string[] = [];
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));

    const api = new NotebookApi("http://x", fakeFetch({
      "GET http://x/cells": () =>
        jsonResponse({
          revision: 1,
          cells: [0, 1].map((i) => ({
            index: i, source: "s", status: "accepted", outcomes: [],
          })),
        }),
      "PUT http://x/cells/0": () => {
        order.push("start-0");
        return new Response(new ReadableStream({
          async start(controller) {
            await gate;
            order.push("finish-0");
            controller.enqueue(new TextEncoder().encode(JSON.stringify({
              revision: 2,
              cell: { index: 0, source: "s", status: "accepted", outcomes: [] },
            }) + "\n"));
            controller.close();
          },
        }));
      },
      "PUT http://x/cells/1": () => {
        order.push("start-1");
        return new Response(streamOf([JSON.stringify({
          revision: 3,
          cell: { index: 1, source: "s", status: "accepted", outcomes: [] },
        })]));
      },
    }));

    const views: SessionView[] = [];
    const controller = new NotebookController(api, (v) => views.push(v));
    await controller.refresh();
    const first = controller.runCell(0, "s");
    const second = controller.runCell(1, "s");
    await new Promise((r) => setTimeout(r, 20));
    expect(order).toEqual(["start-0"]);
    release();
    await first;
    await second;
    expect(order).toEqual(["start-0", "finish-0", "start-1"]);
  });
});
