/** Shared fixtures: a deterministic in-memory stand-in for the service,
 * a traffic-recording fetch, and a view that records what it was told
 * to show. The fake mirrors the real endpoints' shapes and the identity
 * property of full-subset projection.
 */
import type {
  Bins,
  Meta,
  PosteriorResponse,
  PresetEntry,
  ProjectResponse,
  StepwiseResponse,
  TauSummary,
} from "../src/types.js";
import type { ComparePanelVm, WalkthroughVm } from "../src/render.js";
import type { HistoryRowVm, PresetVm, View } from "../src/view.js";
import type { FetchLike } from "../src/api.js";

export const NAMES = ["X1", "X2", "X3", "X4", "X5", "X6"];

export function gaussBins(mean: number, sd: number): Bins {
  const k = 64;
  const lo = mean - 4 * sd;
  const hi = mean + 4 * sd;
  const width = (hi - lo) / k;
  const density = Array.from({ length: k }, (_, j) => {
    const x = lo + (j + 0.5) * width;
    return Math.exp(-0.5 * ((x - mean) / sd) ** 2);
  });
  const mass = density.reduce((a, b) => a + b, 0) * width;
  return { lo, hi, density: density.map((d) => d / mass) };
}

export function summaryOf(mean: number, sd: number): TauSummary {
  return {
    mean,
    sd,
    q025: mean - 1.96 * sd,
    q975: mean + 1.96 * sd,
  };
}

export interface Traffic {
  url: string;
  method: string;
  requestBody: unknown;
  status: number;
  responseBody: unknown;
}

export interface FakeServiceOptions {
  names?: string[];
  /** Sorted-and-joined include lists that refuse with HTTP 422. */
  rankDeficient?: string[][];
  presets?: PresetEntry[] | null;
  /** URLs that reject at the network level instead of answering. */
  unreachable?: Set<string>;
}

export class FakeService {
  readonly names: string[];
  readonly meta: Meta;
  readonly posterior: PosteriorResponse;
  readonly stepwise: StepwiseResponse;
  readonly log: Traffic[] = [];
  readonly options: FakeServiceOptions;
  projectCalls = 0;

  constructor(options: FakeServiceOptions = {}) {
    this.options = options;
    this.names = options.names ?? NAMES;
    this.meta = {
      n: 500,
      p: this.names.length,
      control_names: [...this.names],
      draw_count: 600,
      provenance: "gibbs-hs-ric",
      session: { dataset_id: "d0", draws_id: "w0", created: 1700000000.5 },
    };
    this.posterior = {
      summary: summaryOf(0.21, 0.05),
      bins: gaussBins(0.21, 0.05),
    };
    const steps = this.names.map((_, j) => {
      const removed = this.names[this.names.length - 1 - j] ?? "";
      const mean = 0.21 + 0.02 * (j + 1);
      const sd = 0.05 * (1 + 0.05 * (j + 1));
      return {
        step: j + 1,
        removed,
        d_value: 10 ** (j - 5),
        tau_mean: mean,
        tau_sd: sd,
        tau_q025: mean - 1.96 * sd,
        tau_q975: mean + 1.96 * sd,
      };
    });
    this.stepwise = { steps };
  }

  project(include: string[]): ProjectResponse {
    const dropped = this.names.filter((n) => !include.includes(n));
    if (dropped.length === 0) {
      // projecting onto everything changes nothing, as in the real service
      return {
        include: [...include],
        q: include.length,
        summary: this.posterior.summary,
        bins: this.posterior.bins,
        d_mean: 0.0,
      };
    }
    const mean = 0.21 + 0.045 * dropped.length;
    const sd = 0.05 * (1 + 0.12 * dropped.length);
    return {
      include: [...include],
      q: include.length,
      summary: summaryOf(mean, sd),
      bins: gaussBins(mean, sd),
      d_mean: (mean - 0.21) ** 2,
    };
  }

  private refuses(include: string[]): boolean {
    const key = [...include].sort().join(",");
    return (this.options.rankDeficient ?? []).some(
      (subset) => [...subset].sort().join(",") === key,
    );
  }

  fetch: FetchLike = async (url, init) => {
    if (init?.signal?.aborted) throw abortError();
    if (this.options.unreachable?.has(url)) {
      throw new TypeError("fetch failed");
    }
    const method = init?.method ?? "GET";
    const requestBody = init?.body ? JSON.parse(String(init.body)) : null;
    const answer = (status: number, body: unknown): Response => {
      this.log.push({ url, method, requestBody, status, responseBody: body });
      return new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      });
    };
    if (url === "/meta") return answer(200, this.meta);
    if (url === "/posterior/tau") return answer(200, this.posterior);
    if (url === "/project") {
      this.projectCalls += 1;
      const include = (requestBody as { include: string[] }).include;
      const unknown = include.filter((n) => !this.names.includes(n));
      if (unknown.length > 0) {
        return answer(400, { detail: `unknown control(s) ${unknown}` });
      }
      if (this.refuses(include)) {
        return answer(422, { error: "kept columns are collinear" });
      }
      return answer(200, this.project(include));
    }
    if (url === "/stepwise") return answer(200, this.stepwise);
    if (url === "presets.json") {
      if (this.options.presets == null) return answer(404, { detail: "no" });
      return answer(200, this.options.presets);
    }
    return answer(404, { detail: `no route ${url}` });
  };
}

export function abortError(): Error {
  const err = new Error("aborted");
  err.name = "AbortError";
  return err;
}

/** Wrap a fetch so responses wait for an explicit release, honoring
 * abort while parked. Lets tests hold a request in flight. */
export function gatedFetch(inner: FetchLike): {
  fetch: FetchLike;
  release: () => void;
  parked: () => number;
} {
  let waiters: (() => void)[] = [];
  return {
    fetch: async (url, init) => {
      const resp = inner(url, init);
      resp.catch(() => undefined);
      await new Promise<void>((resolve, reject) => {
        const signal = init?.signal;
        if (signal) {
          if (signal.aborted) {
            reject(abortError());
            return;
          }
          signal.addEventListener("abort", () => reject(abortError()), {
            once: true,
          });
        }
        waiters.push(resolve);
      });
      return resp;
    },
    release: () => {
      const ready = waiters;
      waiters = [];
      for (const go of ready) go();
    },
    parked: () => waiters.length,
  };
}

/** View that records the latest of everything and counts panel renders. */
export class RecordingView implements View {
  sessionText: string | null = null;
  banner: string | null = null;
  warning: string | null = null;
  gridNames: string[] = [];
  gridInclude: boolean[] = [];
  presets: PresetVm[] = [];
  panel: ComparePanelVm | null = null;
  walkthrough: WalkthroughVm | null = null;
  history: HistoryRowVm[] = [];
  panelRenders: ComparePanelVm[] = [];

  setSessionText(text: string | null): void {
    this.sessionText = text;
  }
  setBanner(message: string | null): void {
    this.banner = message;
  }
  setWarning(message: string | null): void {
    this.warning = message;
  }
  renderGrid(names: string[], include: boolean[]): void {
    this.gridNames = names;
    this.gridInclude = include;
  }
  renderPresets(presets: PresetVm[]): void {
    this.presets = presets;
  }
  renderPanel(vm: ComparePanelVm | null): void {
    this.panel = vm;
    if (vm) this.panelRenders.push(vm);
  }
  renderWalkthrough(vm: WalkthroughVm): void {
    this.walkthrough = vm;
  }
  renderHistory(rows: HistoryRowVm[]): void {
    this.history = rows;
  }
}
