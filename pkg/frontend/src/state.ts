/** Session state and its pure transitions.
 *
 * One immutable record holds everything the panels render from: the
 * control roster with its include flags, the original posterior, the
 * last accepted projection, the stepwise path with the slider position,
 * and an append-only history of accepted (subset, summary) pairs.
 * Reducers return fresh records; nothing here touches the network or
 * the document, which is what makes history replay exact.
 */
import type {
  Meta,
  PosteriorResponse,
  ProjectResponse,
  StepwiseResponse,
  TauSummary,
} from "./types.js";

export interface HistoryEntry {
  include: string[];
  summary: TauSummary;
  dMean: number;
}

export interface SubsetState {
  names: string[];
  include: boolean[];
  original: PosteriorResponse | null;
  last: ProjectResponse | null;
  history: HistoryEntry[];
  /** Inline complaint about the pending subset; last good result stays up. */
  warning: string | null;
  /** Page-level failure, shown with a retry control. */
  banner: string | null;
  stepwise: StepwiseResponse | null;
  /** Slider position: 0 is the untouched full model. */
  step: number;
}

export function initialState(): SubsetState {
  return {
    names: [],
    include: [],
    original: null,
    last: null,
    history: [],
    warning: null,
    banner: null,
    stepwise: null,
    step: 0,
  };
}

/** Adopt the served roster; every control starts included. */
export function withMeta(state: SubsetState, meta: Meta): SubsetState {
  return {
    ...state,
    names: [...meta.control_names],
    include: meta.control_names.map(() => true),
  };
}

export function withOriginal(
  state: SubsetState,
  resp: PosteriorResponse,
): SubsetState {
  return { ...state, original: resp };
}

export function toggleControl(state: SubsetState, index: number): SubsetState {
  if (index < 0 || index >= state.include.length) return state;
  const include = [...state.include];
  include[index] = !include[index];
  return { ...state, include };
}

/** Set the grid to exactly the named controls, roster order preserved.
 * Names outside the roster are a caller bug; the flags stay length p. */
export function applyInclude(
  state: SubsetState,
  names: string[],
): SubsetState {
  const wanted = new Set(names);
  return { ...state, include: state.names.map((n) => wanted.has(n)) };
}

/** Names currently switched on, in roster order. */
export function includedNames(state: SubsetState): string[] {
  return state.names.filter((_, j) => state.include[j]);
}

export function projectAccepted(
  state: SubsetState,
  resp: ProjectResponse,
): SubsetState {
  const entry: HistoryEntry = {
    include: [...resp.include],
    summary: resp.summary,
    dMean: resp.d_mean,
  };
  return {
    ...state,
    last: resp,
    warning: null,
    banner: null,
    history: [...state.history, entry],
  };
}

export function projectRefused(
  state: SubsetState,
  message: string,
): SubsetState {
  return { ...state, warning: message };
}

export function serviceDown(state: SubsetState, message: string): SubsetState {
  return { ...state, banner: message };
}

export function bannerCleared(state: SubsetState): SubsetState {
  return { ...state, banner: null };
}

export function withStepwise(
  state: SubsetState,
  resp: StepwiseResponse,
): SubsetState {
  return { ...state, stepwise: resp, step: 0 };
}

export function atStep(state: SubsetState, step: number): SubsetState {
  const max = state.stepwise ? state.stepwise.steps.length : 0;
  const clamped = Math.min(Math.max(Math.trunc(step), 0), max);
  return { ...state, step: clamped };
}

/** Controls still standing after the first `step` removals. */
export function stepSubset(state: SubsetState, step: number): string[] {
  if (!state.stepwise) return [...state.names];
  const gone = new Set(
    state.stepwise.steps.slice(0, step).map((s) => s.removed),
  );
  return state.names.filter((n) => !gone.has(n));
}
