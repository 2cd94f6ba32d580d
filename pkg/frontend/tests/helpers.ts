/** Shared test doubles: an in-memory Storage, a scriptable ServiceApi, and
 * payload builders. The FakeApi plays canned responses per method in FIFO
 * order; the last response sticks so steady-state calls can repeat.
 */

import type { ServiceApi } from "../src/api.js";
import type { KeyValueStore } from "../src/drafts.js";
import type {
  ItemDetail,
  LabelRequest,
  LabelResponse,
  LabelsView,
  QueueEntry,
  QueuePayload,
  RetrainStarted,
  RunStatus,
  Variant,
} from "../src/types.js";

export function memStorage(): KeyValueStore {
  const map = new Map<string, string>();
  return {
    getItem: (k) => map.get(k) ?? null,
    setItem: (k, v) => void map.set(k, v),
    removeItem: (k) => void map.delete(k),
  };
}

type Thunk = () => unknown;

export class FakeApi implements ServiceApi {
  readonly calls: Array<[string, ...unknown[]]> = [];
  private readonly handlers = new Map<string, Thunk[]>();

  respond(method: string, value: unknown): this {
    return this.on(method, () => value);
  }

  fail(method: string, error: Error): this {
    return this.on(method, () => {
      throw error;
    });
  }

  on(method: string, thunk: Thunk): this {
    const q = this.handlers.get(method) ?? [];
    q.push(thunk);
    this.handlers.set(method, q);
    return this;
  }

  private run<T>(method: string, ...args: unknown[]): Promise<T> {
    this.calls.push([method, ...args]);
    const q = this.handlers.get(method);
    if (q === undefined || q.length === 0) {
      return Promise.reject(new Error(`unexpected ${method} call`));
    }
    const thunk = q.length > 1 ? (q.shift() as Thunk) : (q[0] as Thunk);
    try {
      return Promise.resolve(thunk() as T);
    } catch (err) {
      return Promise.reject(err);
    }
  }

  callsTo(method: string): Array<[string, ...unknown[]]> {
    return this.calls.filter(([m]) => m === method);
  }

  queue(variant: Variant, limit: number, itemId?: string): Promise<QueuePayload> {
    return this.run("queue", variant, limit, itemId);
  }
  submitLabel(req: LabelRequest): Promise<LabelResponse> {
    return this.run("submitLabel", req);
  }
  labels(): Promise<LabelsView> {
    return this.run("labels");
  }
  retrain(variant: Variant, seed: number): Promise<RetrainStarted> {
    return this.run("retrain", variant, seed);
  }
  runStatus(runId: string): Promise<RunStatus> {
    return this.run("runStatus", runId);
  }
  item(itemId: string): Promise<ItemDetail> {
    return this.run("item", itemId);
  }
}

export function entry(
  id: string,
  probability: number,
  over: Partial<QueueEntry> = {},
): QueueEntry {
  return {
    comment_id: id,
    text: `comment ${id}`,
    item_id: "I001",
    probability,
    variant: "M1",
    features: { b: 0.42, p: 0.61, r: 0.18, comment_n: 5, exam_score: 37 },
    label: null,
    ...over,
  };
}

export function payload(
  runId: string,
  entries: QueueEntry[],
  total?: number,
): QueuePayload {
  return { run_id: runId, total: total ?? entries.length, entries };
}

export function itemDetail(over: Partial<ItemDetail> = {}): ItemDetail {
  return {
    item_id: "I001",
    form_id: "F1",
    item_type: 0,
    statistics: {
      b: -0.25,
      p: 0.7,
      r: 0.31,
      mean_time: 48.2,
      n: 150,
      infit: 1.02,
      outfit: 0.97,
      drift_magnitude: null,
      drift_flag: null,
    },
    comments: [
      { comment_id: "C000001", text: "first", label: null },
      { comment_id: "C000002", text: "second", label: 1 },
    ],
    ...over,
  };
}

/** Let pending microtasks and zero-delay timers run. */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
