/** View-model for the review session: one mutable state bag, methods for
 * every reviewer action, change notification for the renderer.
 *
 * Rules this enforces rather than leaves to the DOM layer:
 *   - the queue is displayed exactly as served, never re-sorted;
 *   - a failed load or submit keeps what the reviewer already has (stale
 *     queue beats empty queue, drafts survive until acknowledged);
 *   - service errors surface with the server's own message;
 *   - a busy retrain answer (409) changes nothing.
 *
 * Time-dependent pieces (poll cadence) are injected so tests run instant.
 */

import { ApiError, type ServiceApi } from "./api.js";
import type { DraftStore } from "./drafts.js";
import type {
  DecisionDraft,
  ItemDetail,
  QueuePayload,
  Variant,
} from "./types.js";

export interface ControllerDeps {
  api: ServiceApi;
  drafts: DraftStore;
  reviewer?: string;
  pageSize?: number;
  pollIntervalMs?: number;
  maxPollAttempts?: number;
  sleep?: (ms: number) => Promise<void>;
}

export interface RetrainProgress {
  run_id: string;
  status: string;
}

export interface ControllerState {
  variant: Variant;
  /** Pagination cursor: how many entries the server window holds. */
  limit: number;
  queue: QueuePayload | null;
  view: "queue" | "item";
  item: ItemDetail | null;
  banner: string | null;
  notice: string | null;
  retrain: RetrainProgress | null;
  loading: boolean;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

function messageOf(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export class ReviewController {
  readonly state: ControllerState;
  private readonly api: ServiceApi;
  private readonly drafts: DraftStore;
  private readonly reviewer: string;
  private readonly pageSize: number;
  private readonly pollIntervalMs: number;
  private readonly maxPollAttempts: number;
  private readonly sleep: (ms: number) => Promise<void>;
  private readonly listeners = new Set<() => void>();

  constructor(deps: ControllerDeps) {
    this.api = deps.api;
    this.drafts = deps.drafts;
    this.reviewer = deps.reviewer ?? "ui";
    this.pageSize = deps.pageSize ?? 50;
    this.pollIntervalMs = deps.pollIntervalMs ?? 2000;
    this.maxPollAttempts = deps.maxPollAttempts ?? 150;
    this.sleep = deps.sleep ?? defaultSleep;
    this.state = {
      variant: "M1",
      limit: this.pageSize,
      queue: null,
      view: "queue",
      item: null,
      banner: null,
      notice: null,
      retrain: null,
      loading: false,
    };
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  draftFor(commentId: string): DecisionDraft | null {
    return this.drafts.get(commentId);
  }

  clearBanner(): void {
    this.state.banner = null;
    this.emit();
  }

  /** Fetch the current window. On failure the previous payload stays. */
  async loadQueue(): Promise<boolean> {
    this.state.loading = true;
    this.emit();
    try {
      const payload = await this.api.queue(this.state.variant, this.state.limit);
      this.state.queue = payload;
      this.state.banner = null;
      return true;
    } catch (err) {
      this.state.banner = messageOf(err);
      return false;
    } finally {
      this.state.loading = false;
      this.emit();
    }
  }

  async setVariant(variant: Variant): Promise<void> {
    if (variant === this.state.variant) return;
    this.state.variant = variant;
    this.state.limit = this.pageSize;
    await this.loadQueue();
  }

  /** Grow the served window by one page and refetch. */
  async loadMore(): Promise<void> {
    this.state.limit += this.pageSize;
    await this.loadQueue();
  }

  choose(
    commentId: string,
    choice: DecisionDraft["choice"],
    note?: string,
  ): void {
    const draft: DecisionDraft = { comment_id: commentId, choice };
    if (note !== undefined && note !== "") draft.note = note;
    this.drafts.put(draft);
    this.emit();
  }

  /** POST the draft for a comment. Success clears it and refreshes the
   * queue; failure keeps it so the decision can be resent. */
  async submit(commentId: string): Promise<boolean> {
    const draft = this.drafts.get(commentId);
    if (draft === null) {
      this.state.banner = `no decision drafted for ${commentId}`;
      this.emit();
      return false;
    }
    try {
      await this.api.submitLabel({
        comment_id: commentId,
        label: draft.choice === "relevant" ? 1 : 0,
        reviewer: this.reviewer,
      });
    } catch (err) {
      this.state.banner = messageOf(err);
      this.emit();
      return false;
    }
    this.drafts.remove(commentId);
    await this.loadQueue();
    return true;
  }

  /** Kick a retrain and poll until it settles, then refresh the queue.
   * A 409 leaves current state untouched apart from a notice. */
  async retrainNow(seed = 0): Promise<boolean> {
    if (this.state.retrain !== null) {
      this.state.notice = "a retrain is already being tracked";
      this.emit();
      return false;
    }
    let started;
    try {
      started = await this.api.retrain(this.state.variant, seed);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.state.notice = err.message;
      } else {
        this.state.banner = messageOf(err);
      }
      this.emit();
      return false;
    }
    this.state.notice = null;
    this.state.retrain = { run_id: started.run_id, status: "pending" };
    this.emit();
    try {
      for (let attempt = 0; attempt < this.maxPollAttempts; attempt++) {
        let status;
        try {
          status = await this.api.runStatus(started.run_id);
        } catch (err) {
          this.state.banner = messageOf(err);
          return false;
        }
        this.state.retrain = { run_id: started.run_id, status: status.status };
        this.emit();
        if (status.status === "complete") {
          this.state.notice = `retrain complete, serving ${started.run_id}`;
          await this.loadQueue();
          return true;
        }
        if (status.status === "failed") {
          this.state.banner = status.error ?? "retrain failed";
          return false;
        }
        await this.sleep(this.pollIntervalMs);
      }
      this.state.banner = `retrain ${started.run_id} still pending, gave up polling`;
      return false;
    } finally {
      this.state.retrain = null;
      this.emit();
    }
  }

  async openItem(itemId: string): Promise<void> {
    try {
      const detail: ItemDetail = await this.api.item(itemId);
      this.state.item = detail;
      this.state.view = "item";
      this.state.banner = null;
    } catch (err) {
      this.state.banner = messageOf(err);
    }
    this.emit();
  }

  closeItem(): void {
    this.state.view = "queue";
    this.state.item = null;
    this.emit();
  }

  /** Entries currently on screen; empty before the first successful load. */
  entries(): QueuePayload["entries"] {
    return this.state.queue?.entries ?? [];
  }
}
