// @vitest-environment jsdom
//
// End-to-end scripted review session against a real service instance.
// Builds a synthetic store through the CLI whose generator plants false
// positives (relevant wording on clean items, labeled 0), serves it, and
// drives the actual controller + renderer through the loop a reviewer
// would walk: read the queue, label ten planted false positives as
// not relevant, retrain, and get a strictly shorter queue back.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ReviewController } from "../src/controller.js";
import { DraftStore } from "../src/drafts.js";
import { mountApp } from "../src/render.js";
import { memStorage } from "./helpers.js";

// vitest runs with cwd at the frontend package root
const REPO_ROOT = resolve(process.cwd(), "..");
const PYTHON = process.env.PYTHON ?? "python3";

let storeDir: string;
let service: ChildProcess | null = null;
let base: string;

function cli(...argv: string[]): void {
  execFileSync(PYTHON, ["-m", "examqc.cli", "--store", storeDir, ...argv], {
    cwd: REPO_ROOT,
    stdio: ["ignore", "pipe", "pipe"],
  });
}

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const srv = net.createServer();
    srv.once("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address() as net.AddressInfo;
      srv.close(() => resolvePort(addr.port));
    });
  });
}

async function waitReady(url: string): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const res = await fetch(url);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service at ${url} never became ready`);
}

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), "examqc-ui-"));
  // fixture with planted false positives: clean items carrying relevant
  // wording labeled 0, so the scorer genuinely over-flags
  cli(
    "synth",
    "--items", "12",
    "--persons", "150",
    "--seed", "3",
    "--comment-rate", "0.5",
    "--relevant-rate", "0.2",
    "--bait-rate", "0.05",
    "--false-alarm-rate", "0.06",
  );
  cli("stats");
  cli("train-scorer", "--epoch-grid", "100,400");
  cli("score");
  cli("run", "--variant", "M1");

  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  service = spawn(
    PYTHON,
    ["-m", "examqc.cli", "--store", storeDir, "serve", "--port", String(port)],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitReady(`${base}/api/labels`);
}, 120_000);

afterAll(() => {
  if (service !== null) service.kill("SIGTERM");
  if (storeDir !== undefined) rmSync(storeDir, { recursive: true, force: true });
});

describe("scripted review session", () => {
  it(
    "labels planted false positives, retrains, and gets a shorter queue",
    async () => {
      const api = new ApiClient(base);
      const ctl = new ReviewController({
        api,
        drafts: new DraftStore(memStorage()),
        reviewer: "session",
        pageSize: 100,
        pollIntervalMs: 250,
        maxPollAttempts: 400,
      });
      const root = document.createElement("div");
      document.body.append(root);
      mountApp(root, ctl);

      expect(await ctl.loadQueue()).toBe(true);
      const first = ctl.state.queue;
      expect(first).not.toBeNull();
      const startingTotal = first!.total;
      expect(first!.entries.length).toBeGreaterThan(10);

      // the DOM presents exactly the served order
      const domIds = Array.from(
        root.querySelectorAll("tr[data-comment-id]"),
      ).map((tr) => tr.getAttribute("data-comment-id"));
      expect(domIds).toEqual(first!.entries.map((e) => e.comment_id));
      const domProbs = Array.from(root.querySelectorAll("td.prob")).map(
        (td) => td.getAttribute("data-probability"),
      );
      expect(domProbs).toEqual(
        first!.entries.map((e) => String(e.probability)),
      );

      // the generator wrote down which flagged comments are false alarms
      const truth = JSON.parse(
        readFileSync(join(storeDir, "ground_truth.json"), "utf8"),
      ) as { false_alarm_comments: string[] };
      const planted = new Set(truth.false_alarm_comments);
      const victims = first!.entries
        .filter((e) => planted.has(e.comment_id))
        .slice(0, 10)
        .map((e) => e.comment_id);
      expect(victims).toHaveLength(10);

      // ten decisions through the UI path
      for (const cid of victims) {
        ctl.choose(cid, "not_relevant");
        expect(await ctl.submit(cid)).toBe(true);
      }

      // every decision visible through the plain GET
      const view = await api.labels();
      for (const cid of victims) {
        expect(view.labels[cid]).toBe(0);
      }

      // labeled entries left the queue immediately
      expect(ctl.state.queue!.total).toBe(startingTotal - 10);
      for (const cid of victims) {
        expect(
          root.querySelector(`tr[data-comment-id="${cid}"]`),
        ).toBeNull();
      }

      // retrain through the UI, poll to completion, queue refreshes
      expect(await ctl.retrainNow(0)).toBe(true);
      const refreshed = ctl.state.queue;
      expect(refreshed).not.toBeNull();
      expect(refreshed!.run_id).not.toBe(first!.run_id);
      expect(refreshed!.total).toBeLessThan(startingTotal);

      // still rendering the served order after the refresh
      const refreshedIds = Array.from(
        root.querySelectorAll("tr[data-comment-id]"),
      ).map((tr) => tr.getAttribute("data-comment-id"));
      expect(refreshedIds).toEqual(
        refreshed!.entries.map((e) => e.comment_id),
      );
    },
    180_000,
  );
});
