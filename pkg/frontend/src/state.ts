/**
 * Selection state shared by every view, with pure transition functions.
 *
 * The state is a single immutable record; views render from it and all
 * interactions produce a new record, so every cross-view linking rule is
 * testable without a browser.  Group A renders green, group B orange, in
 * every view.
 */

import type {
  CycleSel,
  CycleWindow,
  GroupId,
  Side,
  SpatioPayload,
  TrialRef,
} from "./types.js";

export const GROUP_A_COLOR = "#2e8b57";
export const GROUP_B_COLOR = "#e8832a";

export interface ChartConfig {
  variable: string;
  side: Side;
  cycle: CycleSel;
  showBand: boolean; // confidence band instead of individual trials
}

export interface BrushSel {
  parameter: string;
  lo: number;
  hi: number;
  group: GroupId;
}

export interface PlaybackState {
  ref: TrialRef;
  t: number; // seconds in trial time
}

export interface SelectionState {
  readonly groupA: readonly TrialRef[];
  readonly groupB: readonly TrialRef[];
  readonly charts: readonly ChartConfig[];
  readonly highlighted: ReadonlySet<string>; // refKey()s, subset of groupA ∪ groupB
  readonly brush: BrushSel | null; // when set, highlighted == brush filter result
  readonly videoMode: boolean;
  readonly playback: PlaybackState | null;
}

export function refKey(ref: TrialRef): string {
  return `${ref.group}/${ref.patient_id}/${ref.trial_id}`;
}

export function sameRef(a: TrialRef, b: TrialRef): boolean {
  return refKey(a) === refKey(b);
}

export const DEFAULT_CHARTS: ChartConfig[] = [
  { variable: "grf.fz", side: "left", cycle: "first", showBand: false },
  { variable: "grf.fx", side: "left", cycle: "first", showBand: false },
  { variable: "joint_angles.shank", side: "left", cycle: "first", showBand: false },
  { variable: "joint_angles.foot", side: "left", cycle: "first", showBand: false },
];

export function initialState(): SelectionState {
  return {
    groupA: [],
    groupB: [],
    charts: DEFAULT_CHARTS.map((c) => ({ ...c })),
    highlighted: new Set(),
    brush: null,
    videoMode: false,
    playback: null,
  };
}

export function isSelected(state: SelectionState, ref: TrialRef): boolean {
  return (
    state.groupA.some((r) => sameRef(r, ref)) ||
    state.groupB.some((r) => sameRef(r, ref))
  );
}

function withMembership(
  state: SelectionState,
  group: GroupId,
  refs: readonly TrialRef[],
): SelectionState {
  const next: SelectionState = {
    ...state,
    groupA: group === "a" ? refs : state.groupA,
    groupB: group === "b" ? refs : state.groupB,
  };
  // highlighted must stay a subset of the selected trials
  const valid = new Set([...next.groupA, ...next.groupB].map(refKey));
  const kept = new Set([...next.highlighted].filter((k) => valid.has(k)));
  return { ...next, highlighted: kept, brush: null };
}

export function setGroupMembership(
  state: SelectionState,
  group: GroupId,
  refs: readonly TrialRef[],
): SelectionState {
  return withMembership(state, group, refs);
}

export function toggleTrialSelection(
  state: SelectionState,
  group: GroupId,
  ref: TrialRef,
): SelectionState {
  const current = group === "a" ? state.groupA : state.groupB;
  const without = current.filter((r) => !sameRef(r, ref));
  const refs = without.length === current.length ? [...current, ref] : without;
  return withMembership(state, group, refs);
}

/**
 * Click interaction: toggle one trial's highlight.  A ref that is not
 * selected in either group is ignored.  Any active brush is cleared, since
 * the highlight set no longer mirrors a brushed range.
 */
export function toggleTrialHighlight(state: SelectionState, ref: TrialRef): SelectionState {
  if (!isSelected(state, ref)) {
    return state;
  }
  const key = refKey(ref);
  const highlighted = new Set(state.highlighted);
  if (highlighted.has(key)) {
    highlighted.delete(key);
  } else {
    highlighted.add(key);
  }
  return { ...state, highlighted, brush: null };
}

/**
 * Brush interaction on one parameter of one group's box plot: highlight
 * exactly the trials whose value lies in [lo, hi].
 */
export function applyBrush(
  state: SelectionState,
  perTrial: SpatioPayload["per_trial"],
  parameter: string,
  lo: number,
  hi: number,
  group: GroupId,
): SelectionState {
  const rows = group === "a" ? perTrial.a : perTrial.b;
  const highlighted = new Set<string>();
  for (const row of rows) {
    const value = row.params[parameter];
    if (value !== null && value !== undefined && value >= lo && value <= hi) {
      highlighted.add(refKey(row.ref));
    }
  }
  return { ...state, highlighted, brush: { parameter, lo, hi, group } };
}

export function clearHighlights(state: SelectionState): SelectionState {
  return { ...state, highlighted: new Set(), brush: null };
}

/** Pure view swap: spatiotemporal views <-> video exploration view. */
export function setVideoMode(state: SelectionState, on: boolean): SelectionState {
  return { ...state, videoMode: on };
}

export function setPlayback(
  state: SelectionState,
  playback: PlaybackState | null,
): SelectionState {
  return { ...state, playback };
}

export function setChartConfig(
  state: SelectionState,
  index: number,
  config: ChartConfig,
): SelectionState {
  const charts = state.charts.map((c, i) => (i === index ? { ...config } : c));
  return { ...state, charts };
}

/**
 * Video playback time -> percent of the selected gait cycle; null hides the
 * circular marker when the time falls outside the cycle window.
 */
export function mapPlaybackToCyclePercent(
  window: CycleWindow,
  t: number,
): number | null {
  if (!(window.t_end > window.t_start)) {
    return null;
  }
  if (t < window.t_start || t > window.t_end) {
    return null;
  }
  return (100 * (t - window.t_start)) / (window.t_end - window.t_start);
}

/**
 * Value range of the highlighted trials for one parameter: the band the
 * distribution view shows when trials are highlighted by clicking.
 */
export function highlightBand(
  perTrial: SpatioPayload["per_trial"],
  highlighted: ReadonlySet<string>,
  parameter: string,
): { lo: number; hi: number } | null {
  const values: number[] = [];
  for (const row of [...perTrial.a, ...perTrial.b]) {
    if (!highlighted.has(refKey(row.ref))) continue;
    const value = row.params[parameter];
    if (value !== null && value !== undefined) values.push(value);
  }
  if (!values.length) return null;
  return { lo: Math.min(...values), hi: Math.max(...values) };
}

/** Mean of the highlighted trials per radar axis, normalized to [0, 1]. */
export function highlightedRadarPolygon(
  spatio: SpatioPayload,
  highlighted: ReadonlySet<string>,
): (number | null)[] | null {
  if (!highlighted.size) return null;
  return spatio.radar.axes.map((axis) => {
    const values: number[] = [];
    for (const row of [...spatio.per_trial.a, ...spatio.per_trial.b]) {
      if (!highlighted.has(refKey(row.ref))) continue;
      const v = row.params[axis.parameter];
      if (v !== null && v !== undefined) values.push(v);
    }
    if (!values.length) return null;
    const mean = values.reduce((s, v) => s + v, 0) / values.length;
    if (axis.axis_max > axis.axis_min) {
      return (mean - axis.axis_min) / (axis.axis_max - axis.axis_min);
    }
    return 0.5;
  });
}
