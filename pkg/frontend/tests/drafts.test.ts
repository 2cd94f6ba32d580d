import { describe, expect, it } from "vitest";

import { DraftStore } from "../src/drafts.js";
import { memStorage } from "./helpers.js";

describe("DraftStore", () => {
  it("returns null for unknown comments", () => {
    const store = new DraftStore(memStorage());
    expect(store.get("C000001")).toBeNull();
  });

  it("round-trips a draft with a note", () => {
    const store = new DraftStore(memStorage());
    store.put({ comment_id: "C000001", choice: "relevant", note: "typo" });
    expect(store.get("C000001")).toEqual({
      comment_id: "C000001",
      choice: "relevant",
      note: "typo",
    });
  });

  it("keeps one draft per comment, newest wins", () => {
    const store = new DraftStore(memStorage());
    store.put({ comment_id: "C000001", choice: "relevant" });
    store.put({ comment_id: "C000001", choice: "not_relevant" });
    expect(store.all()).toHaveLength(1);
    expect(store.get("C000001")?.choice).toBe("not_relevant");
  });

  it("removes submitted drafts", () => {
    const store = new DraftStore(memStorage());
    store.put({ comment_id: "C000001", choice: "relevant" });
    store.put({ comment_id: "C000002", choice: "not_relevant" });
    store.remove("C000001");
    expect(store.get("C000001")).toBeNull();
    expect(store.all().map((d) => d.comment_id)).toEqual(["C000002"]);
  });

  it("persists across instances sharing the same storage", () => {
    const storage = memStorage();
    new DraftStore(storage).put({ comment_id: "C000009", choice: "relevant" });
    expect(new DraftStore(storage).get("C000009")?.choice).toBe("relevant");
  });

  it("treats corrupt storage as empty and recovers on the next write", () => {
    const storage = memStorage();
    storage.setItem("examqc.drafts.v1", "{not json");
    const store = new DraftStore(storage);
    expect(store.all()).toEqual([]);
    store.put({ comment_id: "C000001", choice: "relevant" });
    expect(store.get("C000001")?.choice).toBe("relevant");
  });

  it("rejects non-object payloads without throwing", () => {
    for (const bad of ["42", "[1,2]", "null", '"x"']) {
      const storage = memStorage();
      storage.setItem("examqc.drafts.v1", bad);
      expect(new DraftStore(storage).all()).toEqual([]);
    }
  });

  it("clear wipes everything", () => {
    const store = new DraftStore(memStorage());
    store.put({ comment_id: "C000001", choice: "relevant" });
    store.clear();
    expect(store.all()).toEqual([]);
  });
});
