/** Local persistence for in-flight reviewer decisions.
 *
 * A decision lives here from the moment a reviewer picks a choice until
 * the service acknowledges the POST; a page reload or a dead network in
 * between must not lose it. One draft per comment, newer replaces older.
 * Backed by anything Storage-shaped so tests can inject a plain map.
 */

import type { DecisionDraft } from "./types.js";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const DEFAULT_KEY = "examqc.drafts.v1";

export class DraftStore {
  constructor(
    private readonly storage: KeyValueStore,
    private readonly key: string = DEFAULT_KEY,
  ) {}

  private load(): Record<string, DecisionDraft> {
    const raw = this.storage.getItem(this.key);
    if (raw === null) return {};
    try {
      const parsed: unknown = JSON.parse(raw);
      if (parsed === null || typeof parsed !== "object" || Array.isArray(parsed)) {
        return {};
      }
      return parsed as Record<string, DecisionDraft>;
    } catch {
      // corrupt storage resets rather than wedging the UI
      return {};
    }
  }

  private save(drafts: Record<string, DecisionDraft>): void {
    this.storage.setItem(this.key, JSON.stringify(drafts));
  }

  get(commentId: string): DecisionDraft | null {
    return this.load()[commentId] ?? null;
  }

  put(draft: DecisionDraft): void {
    const drafts = this.load();
    drafts[draft.comment_id] = draft;
    this.save(drafts);
  }

  remove(commentId: string): void {
    const drafts = this.load();
    if (commentId in drafts) {
      delete drafts[commentId];
      this.save(drafts);
    }
  }

  all(): DecisionDraft[] {
    return Object.values(this.load());
  }

  clear(): void {
    this.storage.removeItem(this.key);
  }
}
