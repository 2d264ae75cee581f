/**
 * Spatiotemporal distribution view: dual horizontal box plots per
 * parameter.  Dragging across a group's strip brushes a value range, which
 * highlights the matching trials everywhere; when trials are highlighted
 * by clicking lines, a band marks their value range on every parameter.
 */

import type { BoxJson, GroupId, SpatioPayload } from "../types.js";
import {
  GROUP_A_COLOR,
  GROUP_B_COLOR,
  highlightBand,
  type SelectionState,
} from "../state.js";
import { clear, htmlEl, linearScale, svgEl, type Scale } from "./svg.js";

export const ROW_W = 360;
const ROW_H = 56;
const PLOT_LEFT = 8;
const PLOT_RIGHT = ROW_W - 8;
const STRIP_H = 16;

export interface BoxCallbacks {
  onBrush(parameter: string, lo: number, hi: number, group: GroupId): void;
  onClear(): void;
}

function boxExtent(box: BoxJson | null): number[] {
  if (!box) return [];
  return [box.min, box.max];
}

function drawBox(
  svg: SVGSVGElement,
  box: BoxJson,
  x: Scale,
  yMid: number,
  color: string,
  group: GroupId,
  parameter: string,
  tooltip: HTMLElement,
): void {
  const h = STRIP_H;
  svg.appendChild(svgEl("line", {
    x1: x(box.whisker_low), x2: x(box.whisker_high), y1: yMid, y2: yMid,
    stroke: color, class: `whisker group-${group}`,
  }));
  const rect = svgEl("rect", {
    x: x(box.q1), y: yMid - h / 2,
    width: Math.max(x(box.q3) - x(box.q1), 1), height: h,
    fill: color, "fill-opacity": 0.45, stroke: color,
    class: `box group-${group}`, "data-parameter": parameter,
  });
  rect.addEventListener("mouseenter", () => {
    tooltip.textContent =
      `${parameter} (${group === "a" ? "A" : "B"}): min ${box.min.toFixed(3)} ` +
      `q1 ${box.q1.toFixed(3)} median ${box.median.toFixed(3)} ` +
      `q3 ${box.q3.toFixed(3)} max ${box.max.toFixed(3)}`;
    tooltip.style.display = "block";
  });
  rect.addEventListener("mouseleave", () => (tooltip.style.display = "none"));
  svg.appendChild(rect);
  svg.appendChild(svgEl("line", {
    x1: x(box.median), x2: x(box.median),
    y1: yMid - h / 2, y2: yMid + h / 2,
    stroke: "#222", "stroke-width": 1.6, class: "median-line",
  }));
  for (const outlier of box.outliers) {
    const dot = svgEl("circle", {
      cx: x(outlier.value), cy: yMid, r: 3,
      fill: "none", stroke: color, class: `outlier group-${group}`,
      ...(outlier.ref ? { "data-ref": `${outlier.ref.group}/${outlier.ref.patient_id}/${outlier.ref.trial_id}` } : {}),
    });
    if (outlier.ref) {
      const ref = outlier.ref;
      dot.addEventListener("mouseenter", () => {
        tooltip.textContent = `${ref.patient_id} / ${ref.trial_id}: ${outlier.value.toFixed(3)}`;
        tooltip.style.display = "block";
      });
      dot.addEventListener("mouseleave", () => (tooltip.style.display = "none"));
    }
    svg.appendChild(dot);
  }
}

export function renderDistributionView(
  container: HTMLElement,
  spatio: SpatioPayload | null,
  state: SelectionState,
  callbacks: BoxCallbacks,
): void {
  clear(container);
  container.appendChild(htmlEl("div", "view-title", "spatiotemporal distribution"));
  if (!spatio) {
    container.appendChild(htmlEl("div", "placeholder", "select trials to compare"));
    return;
  }
  const tooltip = htmlEl("div", "tooltip");
  tooltip.style.display = "none";
  const list = htmlEl("div", "box-rows");

  for (const parameter of spatio.parameters) {
    const pair = spatio.box[parameter];
    if (!pair || (!pair.a && !pair.b)) continue;
    const values = [
      ...boxExtent(pair.a), ...boxExtent(pair.b),
      ...(pair.a?.outliers.map((o) => o.value) ?? []),
      ...(pair.b?.outliers.map((o) => o.value) ?? []),
    ];
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const pad = (hi - lo || 1) * 0.05;
    const x = linearScale([lo - pad, hi + pad], [PLOT_LEFT, PLOT_RIGHT]);
    const invert = linearScale([PLOT_LEFT, PLOT_RIGHT], [lo - pad, hi + pad]);

    const row = htmlEl("div", "box-row");
    row.appendChild(htmlEl("div", "box-row-label", parameter));
    const svg = svgEl("svg", {
      viewBox: `0 0 ${ROW_W} ${ROW_H}`,
      width: ROW_W,
      height: ROW_H,
      class: "box-svg",
      "data-parameter": parameter,
    });

    // active brush rectangle for this parameter
    if (state.brush && state.brush.parameter === parameter) {
      svg.appendChild(svgEl("rect", {
        x: x(state.brush.lo), y: 2,
        width: Math.max(x(state.brush.hi) - x(state.brush.lo), 1),
        height: ROW_H - 4,
        class: "brush-rect",
        "data-group": state.brush.group,
      }));
    }
    // band spanning the highlighted trials' value range; the brushed
    // parameter's own row shows the brush rectangle instead
    const band = highlightBand(spatio.per_trial, state.highlighted, parameter);
    if (band && !(state.brush && state.brush.parameter === parameter)) {
      svg.appendChild(svgEl("rect", {
        x: x(band.lo) - 2, y: 2,
        width: Math.max(x(band.hi) - x(band.lo), 1) + 4,
        height: ROW_H - 4,
        class: "highlight-band",
        "data-parameter": parameter,
      }));
    }

    if (pair.a) drawBox(svg, pair.a, x, 16, GROUP_A_COLOR, "a", parameter, tooltip);
    if (pair.b) drawBox(svg, pair.b, x, 40, GROUP_B_COLOR, "b", parameter, tooltip);

    // drag to brush: strip y decides the group, x span decides the range
    let dragStart: number | null = null;
    let dragGroup: GroupId = "a";
    svg.addEventListener("mousedown", (event) => {
      dragStart = (event as MouseEvent).offsetX;
      dragGroup = (event as MouseEvent).offsetY <= ROW_H / 2 ? "a" : "b";
    });
    svg.addEventListener("mouseup", (event) => {
      if (dragStart === null) return;
      const end = (event as MouseEvent).offsetX;
      const [px0, px1] = dragStart <= end ? [dragStart, end] : [end, dragStart];
      dragStart = null;
      if (px1 - px0 < 3) {
        callbacks.onClear();
        return;
      }
      callbacks.onBrush(parameter, invert(px0), invert(px1), dragGroup);
    });

    row.appendChild(svg);
    list.appendChild(row);
  }
  container.appendChild(list);
  container.appendChild(tooltip);
}
