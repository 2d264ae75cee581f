/**
 * Time-series ensemble view: one variable over 0-100% of the gait cycle
 * for up to two groups.  Shows either all individual trials (faded dashed)
 * with the ensemble mean, or the mean with its confidence band.
 * Highlighted trials render bold dashed in every mode; hovering reveals
 * patient and trial ids; clicking toggles the persistent highlight; a
 * circular marker tracks video playback.
 */

import type { EnsemblePayload, GroupEnsemble, TrialRef } from "../types.js";
import {
  GROUP_A_COLOR,
  GROUP_B_COLOR,
  refKey,
  type ChartConfig,
  type SelectionState,
} from "../state.js";
import { clear, extent, htmlEl, linearScale, pathFrom, svgEl } from "./svg.js";

export const VIEW_W = 340;
export const VIEW_H = 190;
const MARGIN = { left: 42, right: 8, top: 8, bottom: 22 };

export interface EnsembleCallbacks {
  onToggleTrial(ref: TrialRef): void;
}

function collectValues(group: GroupEnsemble | null, band: boolean): number[] {
  if (!group) return [];
  const out = [...group.mean];
  if (band) {
    out.push(...group.ci_low, ...group.ci_high);
  }
  for (const t of group.per_trial) out.push(...t.values);
  return out;
}

export function renderEnsembleView(
  container: HTMLElement,
  payload: EnsemblePayload | null,
  state: SelectionState,
  config: ChartConfig,
  playbackPercent: number | null,
  callbacks: EnsembleCallbacks,
): void {
  clear(container);
  const title = htmlEl("div", "view-title",
    `${config.variable} (${config.side}, cycle ${config.cycle})`);
  container.appendChild(title);
  if (!payload || (!payload.group_a && !payload.group_b)) {
    container.appendChild(htmlEl("div", "placeholder", "select trials to plot"));
    return;
  }

  const values = [
    ...collectValues(payload.group_a, config.showBand),
    ...collectValues(payload.group_b, config.showBand),
  ];
  const [lo, hi] = extent(values);
  const x = linearScale([0, 100], [MARGIN.left, VIEW_W - MARGIN.right]);
  const y = linearScale([lo, hi], [VIEW_H - MARGIN.bottom, MARGIN.top]);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${VIEW_W} ${VIEW_H}`,
    width: VIEW_W,
    height: VIEW_H,
    class: "ensemble-svg",
  });

  svg.appendChild(svgEl("line", {
    x1: MARGIN.left, x2: VIEW_W - MARGIN.right,
    y1: VIEW_H - MARGIN.bottom, y2: VIEW_H - MARGIN.bottom,
    class: "axis",
  }));
  svg.appendChild(svgEl("line", {
    x1: MARGIN.left, x2: MARGIN.left,
    y1: MARGIN.top, y2: VIEW_H - MARGIN.bottom,
    class: "axis",
  }));
  for (const pct of [0, 50, 100]) {
    const label = svgEl("text", {
      x: x(pct), y: VIEW_H - 6, class: "tick-label", "text-anchor": "middle",
    });
    label.textContent = `${pct}%`;
    svg.appendChild(label);
  }
  for (const v of [lo, hi]) {
    const label = svgEl("text", {
      x: MARGIN.left - 4, y: y(v) + 3, class: "tick-label", "text-anchor": "end",
    });
    label.textContent = v.toPrecision(3);
    svg.appendChild(label);
  }

  const tooltip = htmlEl("div", "tooltip");
  tooltip.style.display = "none";

  const percents = (n: number) =>
    Array.from({ length: n }, (_, i) => (100 * i) / (n - 1));

  const drawGroup = (group: GroupEnsemble | null, color: string, groupClass: string) => {
    if (!group || !group.mean.length) return;
    const pct = percents(group.mean.length);
    if (config.showBand) {
      const upper: [number, number][] = pct.map((p, i) => [x(p), y(group.ci_high[i])]);
      const lower: [number, number][] = pct
        .map((p, i): [number, number] => [x(p), y(group.ci_low[i])])
        .reverse();
      const band = svgEl("path", {
        d: pathFrom([...upper, ...lower]) + "Z",
        class: `ci-band ${groupClass}`,
        fill: color,
        "fill-opacity": 0.18,
        stroke: "none",
      });
      band.addEventListener("mousemove", (event) => {
        const i = Math.min(
          group.mean.length - 1,
          Math.max(0, Math.round(((event as MouseEvent).offsetX - MARGIN.left) /
            (VIEW_W - MARGIN.left - MARGIN.right) * (group.mean.length - 1))),
        );
        tooltip.textContent =
          `${pct[i].toFixed(0)}%  mean ${group.mean[i].toFixed(3)}  ` +
          `low ${group.ci_low[i].toFixed(3)}  high ${group.ci_high[i].toFixed(3)}`;
        tooltip.style.display = "block";
      });
      band.addEventListener("mouseleave", () => (tooltip.style.display = "none"));
      svg.appendChild(band);
    } else {
      for (const trial of group.per_trial) {
        if (state.highlighted.has(refKey(trial.ref))) continue; // drawn on top later
        svg.appendChild(trialPath(trial.ref, trial.values, color, groupClass, false));
      }
    }
    const meanPath = svgEl("path", {
      d: pathFrom(pct.map((p, i) => [x(p), y(group.mean[i])])),
      class: `mean-line ${groupClass}`,
      stroke: color,
      fill: "none",
      "stroke-width": 2,
    });
    svg.appendChild(meanPath);
    // highlighted trials are always visible, even in band mode
    for (const trial of group.per_trial) {
      if (!state.highlighted.has(refKey(trial.ref))) continue;
      svg.appendChild(trialPath(trial.ref, trial.values, color, groupClass, true));
    }
  };

  const trialPath = (
    ref: TrialRef,
    series: number[],
    color: string,
    groupClass: string,
    highlighted: boolean,
  ) => {
    const pct = percents(series.length);
    const path = svgEl("path", {
      d: pathFrom(pct.map((p, i) => [x(p), y(series[i])])),
      class: `trial-line ${groupClass}${highlighted ? " highlighted" : ""}`,
      "data-ref": refKey(ref),
      stroke: color,
      fill: "none",
      "stroke-dasharray": "5 3",
      "stroke-width": highlighted ? 2.6 : 1,
      "stroke-opacity": highlighted ? 1 : 0.35,
    });
    path.addEventListener("click", () => callbacks.onToggleTrial(ref));
    path.addEventListener("mouseenter", () => {
      tooltip.textContent = `${ref.patient_id} / ${ref.trial_id} (${ref.group})`;
      tooltip.style.display = "block";
      path.setAttribute("stroke-opacity", "1");
    });
    path.addEventListener("mouseleave", () => {
      tooltip.style.display = "none";
      path.setAttribute("stroke-opacity", highlighted ? "1" : "0.35");
    });
    return path;
  };

  drawGroup(payload.group_a, GROUP_A_COLOR, "group-a");
  drawGroup(payload.group_b, GROUP_B_COLOR, "group-b");

  if (playbackPercent !== null && state.playback) {
    const group = [payload.group_a, payload.group_b].find((g) =>
      g?.per_trial.some((t) => refKey(t.ref) === refKey(state.playback!.ref)),
    );
    const trial = group?.per_trial.find(
      (t) => refKey(t.ref) === refKey(state.playback!.ref),
    );
    if (trial) {
      const pct = percents(trial.values.length);
      let nearest = 0;
      for (let i = 1; i < pct.length; i++) {
        if (Math.abs(pct[i] - playbackPercent) < Math.abs(pct[nearest] - playbackPercent)) {
          nearest = i;
        }
      }
      svg.appendChild(svgEl("circle", {
        cx: x(playbackPercent),
        cy: y(trial.values[nearest]),
        r: 5,
        class: "playback-marker",
        "data-ref": refKey(trial.ref),
      }));
    }
  }

  container.appendChild(svg);
  container.appendChild(tooltip);
}
