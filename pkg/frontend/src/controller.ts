/** Event handling: user intent in, state transition, view refresh.
 *
 * Single-threaded in the event-loop sense; the only concurrency is the
 * projection request, held to at most one in flight by the debounce plus
 * latest-wins pair. State is replaced, never mutated, and each change
 * ends in one renderAll pass over the view interface.
 */
import {
  ApiClient,
  isAbort,
  loadPresets,
  RankDeficient,
  ServiceUnreachable,
  type FetchLike,
} from "./api.js";
import { DEBOUNCE_MS, debounced, LatestWins, type Debounced } from "./debounce.js";
import {
  comparePanel,
  historyRowText,
  sessionText,
  walkthrough,
} from "./render.js";
import {
  applyInclude,
  atStep,
  bannerCleared,
  includedNames,
  initialState,
  projectAccepted,
  projectRefused,
  serviceDown,
  stepSubset,
  toggleControl,
  withMeta,
  withOriginal,
  withStepwise,
  type SubsetState,
} from "./state.js";
import type { Meta, PresetEntry } from "./types.js";
import type { HistoryRowVm, PresetVm, View } from "./view.js";

export class Controller {
  private state: SubsetState = initialState();
  private meta: Meta | null = null;
  private presets: PresetEntry[] = [];
  private readonly api: ApiClient;
  private readonly latest = new LatestWins();
  private readonly schedule: Debounced<[]>;

  constructor(
    private readonly view: View,
    fetchImpl: FetchLike,
    base = "",
    private readonly presetsUrl = "presets.json",
    debounceMs: number = DEBOUNCE_MS,
  ) {
    this.api = new ApiClient(fetchImpl, base);
    this.schedule = debounced(debounceMs, () => {
      void this.fireProject();
    });
    this.loadPresetsImpl = fetchImpl;
  }

  private readonly loadPresetsImpl: FetchLike;

  /** Exposed for tests; production code never reaches in. */
  snapshot(): SubsetState {
    return this.state;
  }

  async start(): Promise<void> {
    try {
      const meta = await this.api.getMeta();
      this.meta = meta;
      this.state = withMeta(this.state, meta);
      const original = await this.api.getPosteriorTau();
      this.state = withOriginal(this.state, original);
    } catch (err) {
      this.state = serviceDown(this.state, describe(err));
      this.renderAll();
      return;
    }
    this.presets = await loadPresets(this.loadPresetsImpl, this.presetsUrl);
    this.renderAll();
    // the full-subset projection and the elimination path can trickle in
    this.schedule.call();
    void this.loadStepwise();
  }

  async retry(): Promise<void> {
    this.state = bannerCleared(this.state);
    if (!this.meta) {
      await this.start();
      return;
    }
    this.renderAll();
    this.schedule.call();
  }

  onToggle(index: number): void {
    this.state = toggleControl(this.state, index);
    this.renderAll();
    this.schedule.call();
  }

  onPreset(label: string): void {
    const entry = this.presets.find((p) => p.label === label);
    if (!entry || !this.resolvable(entry)) return;
    this.state = applyInclude(this.state, entry.include);
    this.renderAll();
    this.schedule.call();
  }

  onHistory(include: string[]): void {
    this.state = applyInclude(this.state, include);
    this.renderAll();
    this.schedule.call();
  }

  onStep(step: number): void {
    this.state = atStep(this.state, step);
    this.renderAll();
  }

  /** Copy the slider's surviving subset into the toggle grid. */
  onApplyStep(): void {
    this.state = applyInclude(
      this.state,
      stepSubset(this.state, this.state.step),
    );
    this.renderAll();
    this.schedule.call();
  }

  /** Trailing edge of the debounce; aborts any older in-flight request. */
  private async fireProject(): Promise<void> {
    const signal = this.latest.begin();
    try {
      const resp = await this.api.postProject(includedNames(this.state), signal);
      if (signal.aborted) return;
      this.latest.settle(signal);
      this.state = projectAccepted(this.state, resp);
    } catch (err) {
      if (isAbort(err) || signal.aborted) return;
      this.latest.settle(signal);
      if (err instanceof RankDeficient) {
        this.state = projectRefused(this.state, err.message);
      } else {
        this.state = serviceDown(this.state, describe(err));
      }
    }
    this.renderAll();
  }

  private async loadStepwise(): Promise<void> {
    try {
      const resp = await this.api.postStepwise({ metric: "d_M" });
      this.state = withStepwise(this.state, resp);
    } catch (err) {
      if (err instanceof ServiceUnreachable) {
        this.state = serviceDown(this.state, describe(err));
      }
      // a refusal leaves the walkthrough in its disabled state
    }
    this.renderAll();
  }

  private resolvable(entry: PresetEntry): boolean {
    const roster = new Set(this.state.names);
    return entry.include.every((n) => roster.has(n));
  }

  private renderAll(): void {
    const v = this.view;
    v.setSessionText(
      this.meta
        ? sessionText(
            this.meta.n,
            this.meta.p,
            this.meta.draw_count,
            this.meta.provenance,
          )
        : null,
    );
    v.setBanner(this.state.banner);
    v.setWarning(this.state.warning);
    v.renderGrid([...this.state.names], [...this.state.include]);
    v.renderPresets(
      this.presets.map(
        (p): PresetVm => ({ label: p.label, resolvable: this.resolvable(p) }),
      ),
    );
    v.renderPanel(comparePanel(this.state));
    v.renderWalkthrough(walkthrough(this.state));
    v.renderHistory(
      this.state.history.map(
        (h): HistoryRowVm => ({
          text: historyRowText(h.include, h.summary.mean, h.dMean),
          include: [...h.include],
        }),
      ),
    );
  }
}

function describe(err: unknown): string {
  if (err instanceof ServiceUnreachable) {
    return `service unreachable: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
