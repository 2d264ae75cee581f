/**
 * Control panel: hierarchical trial browser with per-trial group A/B
 * checkboxes, per-view chart configuration, and the video-mode toggle that
 * swaps the spatiotemporal views for the video exploration view.
 */

import type { CycleSel, Hierarchy, Side, TrialRef } from "./types.js";
import { refKey, type ChartConfig, type SelectionState } from "./state.js";
import { clear, htmlEl } from "./charts/svg.js";

const VARIABLES = [
  "grf.fz",
  "grf.fx",
  "grf.fy",
  "joint_angles.trunk",
  "joint_angles.thigh",
  "joint_angles.shank",
  "joint_angles.foot",
  "joint_angles.knee",
  "motion.hee_z",
];

const CYCLES: CycleSel[] = ["first", "all", 0, 1, 2, 3];

export interface PanelCallbacks {
  onToggleSelection(group: "a" | "b", ref: TrialRef): void;
  onChartConfig(index: number, config: ChartConfig): void;
  onVideoMode(on: boolean): void;
}

function option(value: string, selected: boolean): HTMLOptionElement {
  const node = document.createElement("option");
  node.value = value;
  node.textContent = value;
  if (selected) node.setAttribute("selected", "");
  return node;
}

export function renderControlPanel(
  container: HTMLElement,
  hierarchy: Hierarchy,
  state: SelectionState,
  callbacks: PanelCallbacks,
): void {
  clear(container);
  container.appendChild(htmlEl("div", "view-title", "trials"));

  const inGroup = (refs: readonly TrialRef[], key: string) =>
    refs.some((r) => refKey(r) === key);

  const tree = htmlEl("div", "hierarchy");
  for (const group of Object.keys(hierarchy)) {
    const groupNode = htmlEl("div", "hier-group");
    groupNode.appendChild(htmlEl("div", "hier-group-name", group));
    for (const patient of Object.keys(hierarchy[group])) {
      const patientNode = htmlEl("div", "hier-patient");
      patientNode.appendChild(htmlEl("div", "hier-patient-name", patient));
      for (const trial of hierarchy[group][patient]) {
        const ref: TrialRef = { group, patient_id: patient, trial_id: trial };
        const key = refKey(ref);
        const row = htmlEl("label", "hier-trial");
        for (const g of ["a", "b"] as const) {
          const box = document.createElement("input");
          box.type = "checkbox";
          box.className = `select-${g}`;
          box.setAttribute("data-ref", key);
          box.checked = inGroup(g === "a" ? state.groupA : state.groupB, key);
          box.addEventListener("change", () => callbacks.onToggleSelection(g, ref));
          row.appendChild(box);
        }
        row.appendChild(htmlEl("span", "hier-trial-name", trial));
        patientNode.appendChild(row);
      }
      groupNode.appendChild(patientNode);
    }
    tree.appendChild(groupNode);
  }
  container.appendChild(tree);

  container.appendChild(htmlEl("div", "view-title", "charts"));
  state.charts.forEach((config, index) => {
    const row = htmlEl("div", "chart-config");
    row.appendChild(htmlEl("span", "chart-config-index", `${index + 1}`));

    const variable = document.createElement("select");
    variable.className = "config-variable";
    for (const v of VARIABLES) variable.appendChild(option(v, v === config.variable));
    variable.addEventListener("change", () =>
      callbacks.onChartConfig(index, { ...config, variable: variable.value }),
    );
    row.appendChild(variable);

    const side = document.createElement("select");
    side.className = "config-side";
    for (const s of ["left", "right"]) side.appendChild(option(s, s === config.side));
    side.addEventListener("change", () =>
      callbacks.onChartConfig(index, { ...config, side: side.value as Side }),
    );
    row.appendChild(side);

    const cycle = document.createElement("select");
    cycle.className = "config-cycle";
    for (const c of CYCLES) cycle.appendChild(option(String(c), String(c) === String(config.cycle)));
    cycle.addEventListener("change", () => {
      const raw = cycle.value;
      const parsed: CycleSel = raw === "first" || raw === "all" ? raw : Number(raw);
      callbacks.onChartConfig(index, { ...config, cycle: parsed });
    });
    row.appendChild(cycle);

    const bandLabel = htmlEl("label", "config-band");
    const band = document.createElement("input");
    band.type = "checkbox";
    band.checked = config.showBand;
    band.addEventListener("change", () =>
      callbacks.onChartConfig(index, { ...config, showBand: band.checked }),
    );
    bandLabel.appendChild(band);
    bandLabel.appendChild(document.createTextNode("band"));
    row.appendChild(bandLabel);

    container.appendChild(row);
  });

  const videoLabel = htmlEl("label", "video-mode-toggle");
  const video = document.createElement("input");
  video.type = "checkbox";
  video.id = "video-mode";
  video.checked = state.videoMode;
  video.addEventListener("change", () => callbacks.onVideoMode(video.checked));
  videoLabel.appendChild(video);
  videoLabel.appendChild(document.createTextNode("video exploration view"));
  container.appendChild(videoLabel);
}
