/** Wire types for the QC service API, mirrored field for field.
 *
 * Every number the UI shows comes from one of these payloads; nothing is
 * computed client side. Nullable statistics arrive as JSON null when the
 * service could not compute them (tiny samples, pretest items) and render
 * as a dash.
 */

export type Variant = "M1" | "M2" | "M3" | "M4" | "M5";

export const VARIANTS: readonly Variant[] = ["M1", "M2", "M3", "M4", "M5"];

export interface QueueFeatures {
  b: number | null;
  p: number | null;
  r: number | null;
  comment_n: number;
  exam_score: number;
}

export interface QueueEntry {
  comment_id: string;
  text: string;
  item_id: string;
  probability: number;
  variant: string;
  features: QueueFeatures;
  label: number | null;
}

export interface QueuePayload {
  run_id: string;
  total: number;
  entries: QueueEntry[];
}

export interface LabelRequest {
  comment_id: string;
  label: 0 | 1;
  reviewer: string;
}

export interface LabelResponse {
  status: string;
  comment_id: string;
  label: number;
}

export interface LabelsView {
  labels: Record<string, number>;
  events: number;
}

export interface RetrainStarted {
  run_id: string;
  status: string;
}

export interface RunStatus {
  run_id: string;
  status: "pending" | "complete" | "failed";
  error?: string;
}

export interface ItemStatistics {
  b: number | null;
  p: number | null;
  r: number | null;
  mean_time: number | null;
  n: number;
  infit: number | null;
  outfit: number | null;
  drift_magnitude: number | null;
  drift_flag: boolean | null;
}

export interface ItemComment {
  comment_id: string;
  text: string;
  label: number | null;
}

export interface ItemDetail {
  item_id: string;
  form_id: string;
  item_type: number;
  statistics: ItemStatistics | null;
  comments: ItemComment[];
}

/** A reviewer decision not yet acknowledged by the service. */
export interface DecisionDraft {
  comment_id: string;
  choice: "relevant" | "not_relevant";
  note?: string;
}
