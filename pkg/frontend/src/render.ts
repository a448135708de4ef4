/** Pure view models for the panels.
 *
 * Everything here maps state to plain data: preformatted strings for
 * the numbers on screen and viewBox coordinates for the SVG layers.
 * Displayed statistics are formatted straight from response fields;
 * geometry (percent positions, path strings) is scaling only. Keeping
 * this layer free of I/O makes replaying a history entry reproduce the
 * panel bit for bit.
 */
import type { Bins, StepwiseStep, TauSummary } from "./types.js";
import { includedNames, stepSubset, SubsetState } from "./state.js";

/** Density curves tolerate this much mass error before being flagged. */
export const INTEGRAL_TOLERANCE = 0.02;

export const CURVE_WIDTH = 100;
export const CURVE_HEIGHT = 40;

export function fmtStat(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  if (Number.isInteger(x) && Math.abs(x) < 1e15) return String(x);
  return x.toPrecision(4);
}

export interface IntervalVm {
  meanText: string;
  intervalText: string;
  sdText: string;
  meanPct: number;
  loPct: number;
  hiPct: number;
}

export interface CurveVm {
  pathD: string;
  /** Riemann sum of the bins; a served density should be ~1. */
  integral: number;
  integralOk: boolean;
}

export interface ComparePanelVm {
  axisLoText: string;
  axisHiText: string;
  zeroPct: number | null;
  original: { interval: IntervalVm; curve: CurveVm };
  projected: { interval: IntervalVm; curve: CurveVm } | null;
  dMeanText: string | null;
  subsetText: string | null;
}

export interface TracePoint {
  xPct: number;
  yPct: number;
  dText: string;
}

export interface WalkthroughVm {
  enabled: boolean;
  maxStep: number;
  step: number;
  stepLabel: string;
  removedSoFar: string[];
  trace: TracePoint[];
  tracePathD: string;
  interval: IntervalVm | null;
  dText: string | null;
  applyInclude: string[];
}

interface Axis {
  lo: number;
  hi: number;
}

function pct(axis: Axis, x: number): number {
  const span = axis.hi - axis.lo;
  if (span <= 0) return 50;
  return ((x - axis.lo) / span) * 100;
}

function intervalVm(summ: TauSummary, axis: Axis): IntervalVm {
  return {
    meanText: fmtStat(summ.mean),
    intervalText: `[${fmtStat(summ.q025)}, ${fmtStat(summ.q975)}]`,
    sdText: fmtStat(summ.sd),
    meanPct: pct(axis, summ.mean),
    loPct: pct(axis, summ.q025),
    hiPct: pct(axis, summ.q975),
  };
}

export function binIntegral(bins: Bins): number {
  const width = (bins.hi - bins.lo) / bins.density.length;
  let total = 0;
  for (const d of bins.density) total += d * width;
  return total;
}

/** Polyline through the bin centers, scaled into the shared viewBox.
 * yMax is the tallest density across every curve on the same axes. */
export function densityPathD(bins: Bins, axis: Axis, yMax: number): string {
  const k = bins.density.length;
  if (k === 0 || yMax <= 0) return "";
  const width = (bins.hi - bins.lo) / k;
  const parts: string[] = [];
  for (let j = 0; j < k; j++) {
    const center = bins.lo + (j + 0.5) * width;
    const x = (pct(axis, center) / 100) * CURVE_WIDTH;
    const y = CURVE_HEIGHT - ((bins.density[j] ?? 0) / yMax) * (CURVE_HEIGHT - 2);
    parts.push(`${parts.length === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
  }
  return parts.join(" ");
}

function curveVm(bins: Bins, axis: Axis, yMax: number): CurveVm {
  const integral = binIntegral(bins);
  return {
    pathD: densityPathD(bins, axis, yMax),
    integral,
    integralOk: Math.abs(integral - 1) <= INTEGRAL_TOLERANCE,
  };
}

/** Axis wide enough for every interval and histogram on display. */
function sharedAxis(parts: { summary: TauSummary; bins: Bins }[]): Axis {
  let lo = Infinity;
  let hi = -Infinity;
  for (const part of parts) {
    lo = Math.min(lo, part.bins.lo, part.summary.q025);
    hi = Math.max(hi, part.bins.hi, part.summary.q975);
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) return { lo: -1, hi: 1 };
  if (hi <= lo) return { lo: lo - 0.5, hi: hi + 0.5 };
  return { lo, hi };
}

export function comparePanel(state: SubsetState): ComparePanelVm | null {
  if (!state.original) return null;
  const shown = [state.original, ...(state.last ? [state.last] : [])];
  const axis = sharedAxis(shown);
  const yMax = Math.max(
    ...shown.map((part) => Math.max(...part.bins.density, 0)),
  );
  const zero = pct(axis, 0);
  const projected = state.last
    ? {
        interval: intervalVm(state.last.summary, axis),
        curve: curveVm(state.last.bins, axis, yMax),
      }
    : null;
  return {
    axisLoText: fmtStat(axis.lo),
    axisHiText: fmtStat(axis.hi),
    zeroPct: zero >= 0 && zero <= 100 ? zero : null,
    original: {
      interval: intervalVm(state.original.summary, axis),
      curve: curveVm(state.original.bins, axis, yMax),
    },
    projected,
    dMeanText: state.last ? fmtStat(state.last.d_mean) : null,
    subsetText: state.last
      ? `${fmtStat(state.last.q)} of ${fmtStat(state.names.length)}`
      : null,
  };
}

function stepSummary(step: StepwiseStep): TauSummary {
  return {
    mean: step.tau_mean,
    sd: step.tau_sd,
    q025: step.tau_q025,
    q975: step.tau_q975,
  };
}

/** Distance trace on a log scale; zero or negative values sit on the
 * floor of the plotted range. */
export function traceGeometry(steps: StepwiseStep[]): TracePoint[] {
  const logs = steps
    .filter((s) => s.d_value > 0)
    .map((s) => Math.log10(s.d_value));
  let lo = Math.min(...logs);
  let hi = Math.max(...logs);
  if (logs.length === 0) {
    lo = -1;
    hi = 1;
  } else if (hi - lo < 1) {
    const mid = (hi + lo) / 2;
    lo = mid - 0.5;
    hi = mid + 0.5;
  }
  return steps.map((s, j) => {
    const frac =
      s.d_value > 0 ? (Math.log10(s.d_value) - lo) / (hi - lo) : 0;
    const x =
      steps.length === 1 ? 50 : (j / (steps.length - 1)) * 100;
    return {
      xPct: x,
      yPct: 100 - frac * 100,
      dText: fmtStat(s.d_value),
    };
  });
}

export function walkthrough(state: SubsetState): WalkthroughVm {
  const steps = state.stepwise?.steps ?? [];
  if (steps.length === 0) {
    return {
      enabled: false,
      maxStep: 0,
      step: 0,
      stepLabel: "no elimination path",
      removedSoFar: [],
      trace: [],
      tracePathD: "",
      interval: null,
      dText: null,
      applyInclude: [],
    };
  }
  const step = Math.min(state.step, steps.length);
  const removedSoFar = steps.slice(0, step).map((s) => s.removed);
  const trace = traceGeometry(steps);
  const tracePathD = trace
    .map(
      (pt, j) =>
        `${j === 0 ? "M" : "L"}${((pt.xPct / 100) * CURVE_WIDTH).toFixed(2)},${(
          (pt.yPct / 100) * CURVE_HEIGHT
        ).toFixed(2)}`,
    )
    .join(" ");
  const current = step === 0 ? null : steps[step - 1];
  let interval: IntervalVm | null = null;
  if (current) {
    const summ = stepSummary(current);
    interval = intervalVm(summ, { lo: summ.q025, hi: summ.q975 });
  } else if (state.original) {
    const summ = state.original.summary;
    interval = intervalVm(summ, { lo: summ.q025, hi: summ.q975 });
  }
  return {
    enabled: true,
    maxStep: steps.length,
    step,
    stepLabel:
      step === 0 ? "full model" : `removed ${step} of ${steps.length}`,
    removedSoFar,
    trace,
    tracePathD,
    interval,
    dText: current ? fmtStat(current.d_value) : null,
    applyInclude: stepSubset(state, step),
  };
}

/** Header line built from served metadata. */
export function sessionText(
  n: number,
  p: number,
  drawCount: number,
  provenance: string,
): string {
  return `n = ${fmtStat(n)}, controls = ${fmtStat(p)}, draws = ${fmtStat(drawCount)} (${provenance})`;
}

/** Compact history row: subset size, effect mean, distance. */
export function historyRowText(
  include: string[],
  mean: number,
  dMean: number,
): string {
  return `${fmtStat(include.length)} kept, mean ${fmtStat(mean)}, d_M ${fmtStat(dMean)}`;
}

export function currentIncludeNames(state: SubsetState): string[] {
  return includedNames(state);
}
