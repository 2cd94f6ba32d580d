/** DOM layer. Renders the whole app from controller state on every change;
 * at desk scale (a few hundred rows) that is simpler and fast enough.
 *
 * Ordering rule: rows are laid out by iterating the served entries array,
 * so DOM order is payload order by construction. Probability cells carry
 * the raw served value in data-probability; the visible text is only a
 * fixed-width rendering of that same field.
 */

import type { ReviewController } from "./controller.js";
import type { ItemDetail, QueueEntry } from "./types.js";
import { VARIANTS, type Variant } from "./types.js";

type Child = Node | string;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  for (const c of children) {
    node.append(typeof c === "string" ? document.createTextNode(c) : c);
  }
  return node;
}

function button(label: string, cls: string, onClick: () => void): HTMLButtonElement {
  const b = el("button", { type: "button", class: cls }, label);
  b.addEventListener("click", onClick);
  return b;
}

/** Dash for absent statistics, matching the service's report rendering. */
function fmtStat(x: number | null): string {
  if (x === null) return "—";
  return Number.isInteger(x) ? String(x) : x.toFixed(3);
}

function header(ctl: ReviewController): HTMLElement {
  const select = el("select", { class: "variant" });
  for (const v of VARIANTS) {
    const opt = el("option", { value: v }, v);
    if (v === ctl.state.variant) opt.setAttribute("selected", "");
    select.append(opt);
  }
  select.addEventListener("change", () => {
    void ctl.setVariant(select.value as Variant);
  });

  const info: Child[] = [];
  if (ctl.state.queue !== null) {
    info.push(el("span", { class: "run-id" }, `run ${ctl.state.queue.run_id}`));
    info.push(
      el("span", { class: "total" }, `${ctl.state.queue.total} awaiting`),
    );
  }
  return el(
    "header",
    {},
    el("h1", {}, "Comment review"),
    select,
    ...info,
    button("Retrain", "retrain", () => void ctl.retrainNow()),
  );
}

function banner(ctl: ReviewController): HTMLElement | null {
  if (ctl.state.banner === null) return null;
  return el(
    "div",
    { class: "banner", role: "alert" },
    el("span", { class: "banner-message" }, ctl.state.banner),
    button("Retry", "retry", () => void ctl.loadQueue()),
    button("Dismiss", "dismiss", () => ctl.clearBanner()),
  );
}

function decisionCell(ctl: ReviewController, entry: QueueEntry): HTMLElement {
  const draft = ctl.draftFor(entry.comment_id);
  const note = el("input", {
    type: "text",
    class: "note",
    placeholder: "note",
  });
  if (draft?.note !== undefined) note.value = draft.note;

  const decide = (choice: "relevant" | "not_relevant") => {
    ctl.choose(entry.comment_id, choice, note.value || undefined);
    void ctl.submit(entry.comment_id);
  };
  const cell = el(
    "td",
    { class: "decision" },
    note,
    button("Relevant", "mark-relevant", () => decide("relevant")),
    button("Not relevant", "mark-not-relevant", () => decide("not_relevant")),
  );
  if (draft !== null) {
    // an unacknowledged decision from earlier; offer a resend
    cell.prepend(el("span", { class: "draft-state" }, `drafted: ${draft.choice}`));
    cell.append(
      button("Resend", "resend", () => void ctl.submit(entry.comment_id)),
    );
  }
  return cell;
}

function queueRow(ctl: ReviewController, entry: QueueEntry): HTMLElement {
  const f = entry.features;
  const itemLink = button("" + entry.item_id, "item-link", () =>
    void ctl.openItem(entry.item_id),
  );
  const row = el(
    "tr",
    { "data-comment-id": entry.comment_id },
    el(
      "td",
      { class: "prob", "data-probability": String(entry.probability) },
      entry.probability.toFixed(3),
    ),
    el("td", { class: "text" }, entry.text),
    el("td", { class: "item" }, itemLink),
    el("td", { class: "stat-b" }, fmtStat(f.b)),
    el("td", { class: "stat-p" }, fmtStat(f.p)),
    el("td", { class: "stat-r" }, fmtStat(f.r)),
    el("td", { class: "stat-comment-n" }, fmtStat(f.comment_n)),
    el("td", { class: "stat-exam-score" }, fmtStat(f.exam_score)),
    decisionCell(ctl, entry),
  );
  if (ctl.draftFor(entry.comment_id) !== null) row.classList.add("drafted");
  return row;
}

function queueView(ctl: ReviewController): HTMLElement {
  const wrap = el("section", { class: "queue-view" });
  const q = ctl.state.queue;
  if (q === null) {
    wrap.append(
      el(
        "p",
        { class: "placeholder" },
        ctl.state.loading ? "loading queue" : "queue not loaded",
      ),
    );
    return wrap;
  }
  if (q.entries.length === 0) {
    wrap.append(el("p", { class: "empty" }, "no comments awaiting review"));
    return wrap;
  }
  const head = el(
    "tr",
    {},
    ...["probability", "comment", "item", "b", "p", "r", "comments", "exam score", "decision"].map(
      (h) => el("th", {}, h),
    ),
  );
  const body = el("tbody", {});
  for (const entry of q.entries) body.append(queueRow(ctl, entry));
  wrap.append(
    el("table", { class: "queue-table" }, el("thead", {}, head), body),
  );
  if (q.entries.length < q.total) {
    wrap.append(
      button(
        `Load more (showing ${q.entries.length} of ${q.total})`,
        "load-more",
        () => void ctl.loadMore(),
      ),
    );
  }
  return wrap;
}

function itemView(ctl: ReviewController, detail: ItemDetail): HTMLElement {
  const wrap = el("section", { class: "item-view" });
  wrap.append(button("Back to queue", "back", () => ctl.closeItem()));
  wrap.append(
    el(
      "h2",
      {},
      `${detail.item_id} (form ${detail.form_id}, ` +
        `${detail.item_type === 1 ? "pretest" : "operational"})`,
    ),
  );
  const s = detail.statistics;
  if (s === null) {
    wrap.append(el("p", { class: "no-stats" }, "no statistics computed"));
  } else {
    const dl = el("dl", { class: "item-stats" });
    const rows: [string, string][] = [
      ["b", fmtStat(s.b)],
      ["p", fmtStat(s.p)],
      ["r", fmtStat(s.r)],
      ["mean time", fmtStat(s.mean_time)],
      ["n", fmtStat(s.n)],
      ["infit", fmtStat(s.infit)],
      ["outfit", fmtStat(s.outfit)],
      ["drift magnitude", fmtStat(s.drift_magnitude)],
      ["drift flag", s.drift_flag === null ? "—" : String(s.drift_flag)],
    ];
    for (const [k, v] of rows) {
      dl.append(el("dt", {}, k), el("dd", {}, v));
    }
    wrap.append(dl);
  }
  const list = el("ul", { class: "item-comments" });
  for (const c of detail.comments) {
    list.append(
      el(
        "li",
        { "data-comment-id": c.comment_id },
        el("span", { class: "label" }, c.label === null ? "?" : String(c.label)),
        " ",
        c.text,
      ),
    );
  }
  wrap.append(el("h3", {}, `comments (${detail.comments.length})`), list);
  return wrap;
}

function app(ctl: ReviewController): HTMLElement {
  const pieces: (HTMLElement | null)[] = [header(ctl), banner(ctl)];
  if (ctl.state.notice !== null) {
    pieces.push(el("div", { class: "notice" }, ctl.state.notice));
  }
  if (ctl.state.retrain !== null) {
    pieces.push(
      el(
        "div",
        { class: "retrain-progress" },
        `retraining ${ctl.state.retrain.run_id}: ${ctl.state.retrain.status}`,
      ),
    );
  }
  const main = el("main", {});
  if (ctl.state.view === "item" && ctl.state.item !== null) {
    main.append(itemView(ctl, ctl.state.item));
  } else {
    main.append(queueView(ctl));
  }
  pieces.push(main);
  const root = el("div", { class: "app" });
  for (const p of pieces) if (p !== null) root.append(p);
  return root;
}

export function mountApp(root: HTMLElement, ctl: ReviewController): () => void {
  const rerender = () => root.replaceChildren(app(ctl));
  const unsubscribe = ctl.subscribe(rerender);
  rerender();
  return unsubscribe;
}
