/** Thin typed client over the service's JSON endpoints.
 *
 * Error contract: the service answers failures with {code, message}. Those
 * surface as ApiError with the HTTP status; anything that never reached
 * the service (DNS, refused connection, aborted socket) becomes status 0
 * with code "network" so callers can distinguish "service said no" from
 * "service unreachable".
 */

import type {
  ItemDetail,
  LabelRequest,
  LabelResponse,
  LabelsView,
  QueuePayload,
  RetrainStarted,
  RunStatus,
  Variant,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** What the controller needs from the service; ApiClient is the real one. */
export interface ServiceApi {
  queue(variant: Variant, limit: number, itemId?: string): Promise<QueuePayload>;
  submitLabel(req: LabelRequest): Promise<LabelResponse>;
  labels(): Promise<LabelsView>;
  retrain(variant: Variant, seed: number): Promise<RetrainStarted>;
  runStatus(runId: string): Promise<RunStatus>;
  item(itemId: string): Promise<ItemDetail>;
}

export class ApiClient implements ServiceApi {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    // fetch must not be captured as a bare reference: calling it detached
    // from globalThis throws in some engines.
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, "network", `service unreachable: ${String(err)}`);
    }
    if (!res.ok) {
      let code = `http_${res.status}`;
      let message = res.statusText || `request failed (${res.status})`;
      try {
        const body = (await res.json()) as { code?: string; message?: string };
        if (body && typeof body.code === "string") code = body.code;
        if (body && typeof body.message === "string") message = body.message;
      } catch {
        // non-JSON error body, keep the fallback
      }
      throw new ApiError(res.status, code, message);
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  queue(variant: Variant, limit: number, itemId?: string): Promise<QueuePayload> {
    const q = new URLSearchParams({ variant, limit: String(limit) });
    if (itemId !== undefined) q.set("item_id", itemId);
    return this.request<QueuePayload>(`/api/queue?${q.toString()}`);
  }

  submitLabel(req: LabelRequest): Promise<LabelResponse> {
    return this.post<LabelResponse>("/api/labels", req);
  }

  labels(): Promise<LabelsView> {
    return this.request<LabelsView>("/api/labels");
  }

  retrain(variant: Variant, seed: number): Promise<RetrainStarted> {
    return this.post<RetrainStarted>("/api/retrain", { variant, seed });
  }

  runStatus(runId: string): Promise<RunStatus> {
    return this.request<RunStatus>(`/api/runs/${encodeURIComponent(runId)}`);
  }

  item(itemId: string): Promise<ItemDetail> {
    return this.request<ItemDetail>(`/api/items/${encodeURIComponent(itemId)}`);
  }
}
