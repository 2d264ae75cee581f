/**
 * Application controller: owns the selection state, loads payloads from
 * the service, and re-renders every view after each transition so the
 * cross-view linking rules hold by construction.  Server responses are
 * discarded when a newer request of the same kind is already in flight
 * (sequence-number keying).
 */

import type { ApiClient } from "./api.js";
import type {
  CycleWindow,
  EnsemblePayload,
  GroupId,
  Hierarchy,
  SpatioPayload,
  TrialRef,
} from "./types.js";
import {
  applyBrush,
  clearHighlights,
  initialState,
  mapPlaybackToCyclePercent,
  refKey,
  setChartConfig,
  setGroupMembership,
  setPlayback,
  setVideoMode,
  toggleTrialHighlight,
  toggleTrialSelection,
  type ChartConfig,
  type SelectionState,
} from "./state.js";
import { renderEnsembleView } from "./charts/ensemble.js";
import { renderDistributionView } from "./charts/boxes.js";
import { renderRadarView } from "./charts/radar.js";
import { renderVideoView } from "./charts/video.js";
import { renderControlPanel } from "./panel.js";
import { htmlEl, clear } from "./charts/svg.js";

export class App {
  state: SelectionState = initialState();
  hierarchy: Hierarchy = {};
  ensembles: (EnsemblePayload | null)[] = [null, null, null, null];
  spatio: SpatioPayload | null = null;
  windows: Map<string, CycleWindow> = new Map();

  private seq = { ensemble: [0, 0, 0, 0], spatio: 0 };
  private panelEl!: HTMLElement;
  private ensembleEls: HTMLElement[] = [];
  private sideEl!: HTMLElement;

  constructor(private api: ApiClient, private root: HTMLElement) {}

  async start(): Promise<void> {
    this.buildLayout();
    this.hierarchy = await this.api.hierarchy();
    this.render();
  }

  private buildLayout(): void {
    clear(this.root);
    this.panelEl = htmlEl("div", "panel");
    const charts = htmlEl("div", "charts-grid");
    this.ensembleEls = [0, 1, 2, 3].map(() => {
      const view = htmlEl("div", "ensemble-view");
      charts.appendChild(view);
      return view;
    });
    this.sideEl = htmlEl("div", "side-pane");
    this.root.appendChild(this.panelEl);
    this.root.appendChild(charts);
    this.root.appendChild(this.sideEl);
  }

  private selectedRefs(): TrialRef[] {
    return [...this.state.groupA, ...this.state.groupB];
  }

  /** Apply a pure transition and repaint. */
  dispatch(next: SelectionState): void {
    this.state = next;
    this.render();
  }

  // --- data loading -------------------------------------------------------

  async reloadData(): Promise<void> {
    await Promise.all([
      ...this.state.charts.map((_, i) => this.reloadEnsemble(i)),
      this.reloadSpatio(),
    ]);
  }

  async reloadEnsemble(index: number): Promise<void> {
    const config = this.state.charts[index];
    if (!this.state.groupA.length && !this.state.groupB.length) {
      this.ensembles[index] = null;
      this.render();
      return;
    }
    const ticket = ++this.seq.ensemble[index];
    try {
      // group A is required by the service; fall back to B alone client-side
      const trialsA = this.state.groupA.length ? [...this.state.groupA] : [...this.state.groupB];
      const trialsB = this.state.groupA.length ? [...this.state.groupB] : [];
      const payload = await this.api.ensemble({
        trials_a: trialsA,
        trials_b: trialsB,
        variable: config.variable,
        side: config.side,
        cycle: config.cycle,
      });
      if (ticket !== this.seq.ensemble[index]) return; // stale response
      if (!this.state.groupA.length) {
        // swap back so colors stay honest (A green, B orange)
        this.ensembles[index] = {
          ...payload, group_a: null, group_b: payload.group_a,
        };
      } else {
        this.ensembles[index] = payload;
      }
    } catch {
      if (ticket === this.seq.ensemble[index]) this.ensembles[index] = null;
    }
    this.render();
  }

  async reloadSpatio(): Promise<void> {
    if (!this.state.groupA.length && !this.state.groupB.length) {
      this.spatio = null;
      this.render();
      return;
    }
    const ticket = ++this.seq.spatio;
    try {
      const a = this.state.groupA.length ? [...this.state.groupA] : [...this.state.groupB];
      const b = this.state.groupA.length ? [...this.state.groupB] : [];
      const payload = await this.api.spatiotemporal(a, b);
      if (ticket !== this.seq.spatio) return;
      if (!this.state.groupA.length) {
        this.spatio = {
          ...payload,
          per_trial: { a: [], b: payload.per_trial.a },
          box: Object.fromEntries(
            Object.entries(payload.box).map(([k, v]) => [k, { a: null, b: v.a }]),
          ),
        };
      } else {
        this.spatio = payload;
      }
    } catch {
      if (ticket === this.seq.spatio) this.spatio = null;
    }
    this.render();
  }

  // --- interactions ---------------------------------------------------------

  toggleSelection(group: GroupId, ref: TrialRef): void {
    this.dispatch(toggleTrialSelection(this.state, group, ref));
    void this.reloadData();
  }

  setConfig(index: number, config: ChartConfig): void {
    this.dispatch(setChartConfig(this.state, index, config));
    void this.reloadEnsemble(index);
  }

  toggleHighlight(ref: TrialRef): void {
    this.dispatch(toggleTrialHighlight(this.state, ref));
  }

  brush(parameter: string, lo: number, hi: number, group: GroupId): void {
    if (!this.spatio) return;
    this.dispatch(applyBrush(this.state, this.spatio.per_trial, parameter, lo, hi, group));
  }

  clearBrush(): void {
    this.dispatch(clearHighlights(this.state));
  }

  videoMode(on: boolean): void {
    this.dispatch(setVideoMode(this.state, on));
  }

  playback(ref: TrialRef, t: number): void {
    this.dispatch(setPlayback(this.state, { ref, t }));
    void this.ensureWindows(ref);
  }

  playbackEnd(): void {
    this.dispatch(setPlayback(this.state, null));
  }

  private async ensureWindows(ref: TrialRef): Promise<void> {
    let missing = false;
    for (const config of this.state.charts) {
      const key = `${refKey(ref)}|${config.side}|${config.cycle}`;
      if (!this.windows.has(key)) {
        missing = true;
        try {
          this.windows.set(key, await this.api.cycleWindow(ref, config.side, config.cycle));
        } catch {
          this.windows.set(key, { t_start: 0, t_end: 0 });
        }
      }
    }
    if (missing) this.render();
  }

  playbackPercent(index: number): number | null {
    if (!this.state.playback) return null;
    const config = this.state.charts[index];
    const key = `${refKey(this.state.playback.ref)}|${config.side}|${config.cycle}`;
    const window = this.windows.get(key);
    if (!window) return null;
    return mapPlaybackToCyclePercent(window, this.state.playback.t);
  }

  // --- rendering ---------------------------------------------------------------

  render(): void {
    renderControlPanel(this.panelEl, this.hierarchy, this.state, {
      onToggleSelection: (group, ref) => this.toggleSelection(group, ref),
      onChartConfig: (index, config) => this.setConfig(index, config),
      onVideoMode: (on) => this.videoMode(on),
    });
    this.state.charts.forEach((config, i) => {
      renderEnsembleView(
        this.ensembleEls[i],
        this.ensembles[i],
        this.state,
        config,
        this.playbackPercent(i),
        { onToggleTrial: (ref) => this.toggleHighlight(ref) },
      );
    });
    clear(this.sideEl);
    if (this.state.videoMode) {
      const videoPane = htmlEl("div", "video-pane");
      this.sideEl.appendChild(videoPane);
      renderVideoView(videoPane, this.state, this.selectedRefs(), {
        videoUrl: (ref) => this.api.videoUrl(ref),
        onPlayback: (ref, t) => this.playback(ref, t),
        onPlaybackEnd: () => this.playbackEnd(),
      });
    } else {
      const radarPane = htmlEl("div", "radar-pane");
      const boxPane = htmlEl("div", "box-pane");
      this.sideEl.appendChild(radarPane);
      this.sideEl.appendChild(boxPane);
      renderRadarView(radarPane, this.spatio, this.state);
      renderDistributionView(boxPane, this.spatio, this.state, {
        onBrush: (parameter, lo, hi, group) => this.brush(parameter, lo, hi, group),
        onClear: () => this.clearBrush(),
      });
    }
  }
}

export { setGroupMembership };
