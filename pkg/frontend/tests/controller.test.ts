import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { ReviewController } from "../src/controller.js";
import { DraftStore } from "../src/drafts.js";
import { FakeApi, entry, memStorage, payload } from "./helpers.js";

function makeController(api: FakeApi, extra: Record<string, unknown> = {}) {
  return new ReviewController({
    api,
    drafts: new DraftStore(memStorage()),
    sleep: () => Promise.resolve(),
    ...extra,
  });
}

describe("loadQueue", () => {
  it("stores the served payload untouched", async () => {
    const served = payload("r1", [entry("C2", 0.9), entry("C1", 0.8)]);
    const api = new FakeApi().respond("queue", served);
    const ctl = makeController(api);
    expect(await ctl.loadQueue()).toBe(true);
    // served order kept even though comment ids sort the other way
    expect(ctl.entries().map((e) => e.comment_id)).toEqual(["C2", "C1"]);
    expect(ctl.state.banner).toBeNull();
  });

  it("keeps the previous queue and raises a banner on failure", async () => {
    const api = new FakeApi()
      .respond("queue", payload("r1", [entry("C1", 0.9)]))
      .fail("queue", new ApiError(0, "network", "service unreachable: down"));
    const ctl = makeController(api);
    await ctl.loadQueue();
    expect(await ctl.loadQueue()).toBe(false);
    expect(ctl.entries().map((e) => e.comment_id)).toEqual(["C1"]);
    expect(ctl.state.banner).toBe("service unreachable: down");
  });

  it("notifies subscribers on every state change", async () => {
    const api = new FakeApi().respond("queue", payload("r1", []));
    const ctl = makeController(api);
    let ticks = 0;
    ctl.subscribe(() => ticks++);
    await ctl.loadQueue();
    expect(ticks).toBeGreaterThanOrEqual(2); // loading on, result in
  });
});

describe("variant and pagination", () => {
  it("setVariant resets the window and reloads", async () => {
    const api = new FakeApi().respond("queue", payload("r1", []));
    const ctl = makeController(api, { pageSize: 20 });
    await ctl.loadQueue();
    await ctl.loadMore();
    expect(api.callsTo("queue").map((c) => c[2])).toEqual([20, 40]);
    await ctl.setVariant("M4");
    const last = api.callsTo("queue").at(-1);
    expect(last?.[1]).toBe("M4");
    expect(last?.[2]).toBe(20); // cursor reset
  });

  it("setVariant to the current variant is a no-op", async () => {
    const api = new FakeApi();
    const ctl = makeController(api);
    await ctl.setVariant("M1");
    expect(api.calls).toHaveLength(0);
  });

  it("loadMore grows the served window by one page", async () => {
    const api = new FakeApi().respond("queue", payload("r1", []));
    const ctl = makeController(api, { pageSize: 50 });
    await ctl.loadQueue();
    await ctl.loadMore();
    await ctl.loadMore();
    expect(api.callsTo("queue").map((c) => c[2])).toEqual([50, 100, 150]);
  });
});

describe("decisions", () => {
  it("choose stores a draft, submit posts it and clears it", async () => {
    const api = new FakeApi()
      .respond("queue", payload("r1", [entry("C1", 0.9)]))
      .respond("submitLabel", { status: "ok", comment_id: "C1", label: 0 });
    const ctl = makeController(api, { reviewer: "alice" });
    await ctl.loadQueue();
    ctl.choose("C1", "not_relevant", "seen it before");
    expect(ctl.draftFor("C1")).toEqual({
      comment_id: "C1",
      choice: "not_relevant",
      note: "seen it before",
    });
    expect(await ctl.submit("C1")).toBe(true);
    expect(api.callsTo("submitLabel")[0]?.[1]).toEqual({
      comment_id: "C1",
      label: 0,
      reviewer: "alice",
    });
    expect(ctl.draftFor("C1")).toBeNull();
    // the queue is refreshed after the mutation
    expect(api.callsTo("queue")).toHaveLength(2);
  });

  it("maps the relevant choice to label 1", async () => {
    const api = new FakeApi()
      .respond("queue", payload("r1", [entry("C1", 0.9)]))
      .respond("submitLabel", { status: "ok", comment_id: "C1", label: 1 });
    const ctl = makeController(api);
    await ctl.loadQueue();
    ctl.choose("C1", "relevant");
    await ctl.submit("C1");
    const req = api.callsTo("submitLabel")[0]?.[1] as { label: number };
    expect(req.label).toBe(1);
  });

  it("keeps the draft and surfaces the server message on failure", async () => {
    const api = new FakeApi()
      .respond("queue", payload("r1", [entry("C1", 0.9)]))
      .fail(
        "submitLabel",
        new ApiError(404, "unknown_comment", "unknown comment 'C1'"),
      );
    const ctl = makeController(api);
    await ctl.loadQueue();
    ctl.choose("C1", "relevant");
    expect(await ctl.submit("C1")).toBe(false);
    expect(ctl.state.banner).toBe("unknown comment 'C1'");
    expect(ctl.draftFor("C1")?.choice).toBe("relevant");
    // no reload happened, the stale-but-intact queue stays on screen
    expect(api.callsTo("queue")).toHaveLength(1);
  });

  it("refuses to submit without a draft", async () => {
    const api = new FakeApi();
    const ctl = makeController(api);
    expect(await ctl.submit("C9")).toBe(false);
    expect(api.callsTo("submitLabel")).toHaveLength(0);
    expect(ctl.state.banner).toContain("C9");
  });
});

describe("retrain", () => {
  it("polls until complete, then reloads the queue for the new run", async () => {
    const slept: number[] = [];
    const api = new FakeApi()
      .respond("queue", payload("r1", [entry("C1", 0.9)]))
      .respond("queue", payload("r2", []))
      .respond("retrain", { run_id: "r2", status: "started" })
      .respond("runStatus", { run_id: "r2", status: "pending" })
      .respond("runStatus", { run_id: "r2", status: "pending" })
      .respond("runStatus", { run_id: "r2", status: "complete" });
    const ctl = makeController(api, {
      pollIntervalMs: 2000,
      sleep: (ms: number) => {
        slept.push(ms);
        return Promise.resolve();
      },
    });
    await ctl.loadQueue();
    expect(await ctl.retrainNow()).toBe(true);
    expect(slept).toEqual([2000, 2000]); // one wait per pending answer
    expect(ctl.state.queue?.run_id).toBe("r2");
    expect(ctl.state.retrain).toBeNull();
    expect(ctl.state.notice).toContain("r2");
  });

  it("shows a busy answer non-destructively", async () => {
    const api = new FakeApi()
      .respond("queue", payload("r1", [entry("C1", 0.9)]))
      .fail(
        "retrain",
        new ApiError(409, "busy", "a retrain is already in progress"),
      );
    const ctl = makeController(api);
    await ctl.loadQueue();
    expect(await ctl.retrainNow()).toBe(false);
    expect(ctl.state.notice).toBe("a retrain is already in progress");
    expect(ctl.state.banner).toBeNull();
    expect(ctl.entries().map((e) => e.comment_id)).toEqual(["C1"]);
    expect(api.callsTo("queue")).toHaveLength(1); // no reload
  });

  it("surfaces a single-class rejection as a banner", async () => {
    const api = new FakeApi().fail(
      "retrain",
      new ApiError(422, "single_class", "retraining needs labeled comments of both classes"),
    );
    const ctl = makeController(api);
    expect(await ctl.retrainNow()).toBe(false);
    expect(ctl.state.banner).toBe(
      "retraining needs labeled comments of both classes",
    );
  });

  it("reports a failed job with its error text", async () => {
    const api = new FakeApi()
      .respond("retrain", { run_id: "r2", status: "started" })
      .respond("runStatus", {
        run_id: "r2",
        status: "failed",
        error: "scorer diverged",
      });
    const ctl = makeController(api);
    expect(await ctl.retrainNow()).toBe(false);
    expect(ctl.state.banner).toBe("scorer diverged");
    expect(ctl.state.retrain).toBeNull();
  });

  it("gives up after the polling budget", async () => {
    const api = new FakeApi()
      .respond("retrain", { run_id: "r2", status: "started" })
      .respond("runStatus", { run_id: "r2", status: "pending" });
    const ctl = makeController(api, { maxPollAttempts: 3 });
    expect(await ctl.retrainNow()).toBe(false);
    expect(ctl.state.banner).toContain("still pending");
    expect(api.callsTo("runStatus")).toHaveLength(3);
  });
});

describe("item view", () => {
  it("opens and closes the detail view", async () => {
    const api = new FakeApi().respond("item", {
      item_id: "I004",
      form_id: "F1",
      item_type: 0,
      statistics: null,
      comments: [],
    });
    const ctl = makeController(api);
    await ctl.openItem("I004");
    expect(ctl.state.view).toBe("item");
    expect(ctl.state.item?.item_id).toBe("I004");
    ctl.closeItem();
    expect(ctl.state.view).toBe("queue");
    expect(ctl.state.item).toBeNull();
  });

  it("stays on the queue when the item fetch fails", async () => {
    const api = new FakeApi().fail(
      "item",
      new ApiError(404, "unknown_item", "unknown item 'I999'"),
    );
    const ctl = makeController(api);
    await ctl.openItem("I999");
    expect(ctl.state.view).toBe("queue");
    expect(ctl.state.banner).toBe("unknown item 'I999'");
  });
});
