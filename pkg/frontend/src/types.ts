/** Shapes of the JSON payloads the service exchanges with this client.
 *
 * These mirror the server responses field for field. The client never
 * derives a statistic of its own; every number shown on screen is read
 * out of one of these structures.
 */

export interface TauSummary {
  mean: number;
  sd: number;
  q025: number;
  q975: number;
}

/** Fixed-width density histogram over [lo, hi] with uniform bins. */
export interface Bins {
  lo: number;
  hi: number;
  density: number[];
}

export interface SessionInfo {
  dataset_id: string;
  draws_id: string;
  created: number;
}

export interface Meta {
  n: number;
  p: number;
  control_names: string[];
  draw_count: number;
  provenance: string;
  session: SessionInfo;
}

export interface PosteriorResponse {
  summary: TauSummary;
  bins: Bins;
}

export interface ProjectResponse {
  include: string[];
  q: number;
  summary: TauSummary;
  bins: Bins;
  d_mean: number;
}

export interface StepwiseStep {
  step: number;
  removed: string;
  d_value: number;
  tau_mean: number;
  tau_sd: number;
  tau_q025: number;
  tau_q975: number;
}

export interface StepwiseResponse {
  steps: StepwiseStep[];
}

export interface StepwiseRequest {
  metric?: string;
  keep?: number;
  stop_when?: number;
}

/** One named row of a subset spec file: a label and the controls it keeps. */
export interface PresetEntry {
  label: string;
  include: string[];
}
