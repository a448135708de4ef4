/** Typed access to the service endpoints.
 *
 * The fetch implementation is injected so tests can intercept traffic and
 * serve canned bodies. Error mapping is deliberately coarse: a rejected
 * fetch means the service is unreachable, HTTP 422 carries a domain
 * refusal (rank-deficient subset), anything else non-2xx is a request
 * the client built wrong. Abort errors pass through untouched so the
 * caller can recognize its own cancellations.
 */
import type {
  Meta,
  PosteriorResponse,
  PresetEntry,
  ProjectResponse,
  StepwiseRequest,
  StepwiseResponse,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ServiceUnreachable extends Error {}

export class RequestRejected extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

/** HTTP 422: the requested subset cannot be projected onto. */
export class RankDeficient extends RequestRejected {}

export function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

async function errorText(resp: Response): Promise<string> {
  try {
    const body: unknown = await resp.json();
    if (body && typeof body === "object") {
      const rec = body as Record<string, unknown>;
      if (typeof rec.error === "string") return rec.error;
      if (typeof rec.detail === "string") return rec.detail;
    }
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${resp.status}`;
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly base: string = "",
  ) {}

  private async request<T>(
    path: string,
    init?: RequestInit,
  ): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      if (isAbort(err)) throw err;
      throw new ServiceUnreachable(
        err instanceof Error ? err.message : String(err),
      );
    }
    if (!resp.ok) {
      const msg = await errorText(resp);
      if (resp.status === 422) throw new RankDeficient(msg, resp.status);
      throw new RequestRejected(msg, resp.status);
    }
    return (await resp.json()) as T;
  }

  getMeta(): Promise<Meta> {
    return this.request<Meta>("/meta");
  }

  getPosteriorTau(): Promise<PosteriorResponse> {
    return this.request<PosteriorResponse>("/posterior/tau");
  }

  postProject(
    include: string[],
    signal?: AbortSignal,
  ): Promise<ProjectResponse> {
    return this.request<ProjectResponse>("/project", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ include }),
      signal,
    });
  }

  postStepwise(body: StepwiseRequest = {}): Promise<StepwiseResponse> {
    return this.request<StepwiseResponse>("/stepwise", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}

/** Load named subsets from a static file next to the page.
 *
 * Same format as the CLI's subset spec files: a JSON array of
 * {label, include}. Malformed entries are dropped rather than fatal,
 * and a missing file just means no preset buttons.
 */
export async function loadPresets(
  fetchImpl: FetchLike,
  url = "presets.json",
): Promise<PresetEntry[]> {
  let doc: unknown;
  try {
    const resp = await fetchImpl(url);
    if (!resp.ok) return [];
    doc = await resp.json();
  } catch {
    return [];
  }
  if (!Array.isArray(doc)) return [];
  const out: PresetEntry[] = [];
  for (const entry of doc) {
    if (!entry || typeof entry !== "object") continue;
    const rec = entry as Record<string, unknown>;
    if (typeof rec.label !== "string" || !Array.isArray(rec.include)) continue;
    if (!rec.include.every((v) => typeof v === "string")) continue;
    out.push({ label: rec.label, include: rec.include as string[] });
  }
  return out;
}
