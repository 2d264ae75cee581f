/**
 * Spatiotemporal summary view: radar chart of per-parameter group means on
 * shared normalized axes.  Highlighted trials overlay as a dashed polygon;
 * hovering an axis label shows the numeric means of both groups.
 */

import type { SpatioPayload } from "../types.js";
import {
  GROUP_A_COLOR,
  GROUP_B_COLOR,
  highlightedRadarPolygon,
  type SelectionState,
} from "../state.js";
import { clear, htmlEl, polygonPoints, svgEl } from "./svg.js";

const SIZE = 320;
const CENTER = SIZE / 2;
const RADIUS = SIZE / 2 - 58;

function axisPoint(index: number, count: number, radius: number): [number, number] {
  const angle = (2 * Math.PI * index) / count - Math.PI / 2;
  return [CENTER + radius * Math.cos(angle), CENTER + radius * Math.sin(angle)];
}

export function renderRadarView(
  container: HTMLElement,
  spatio: SpatioPayload | null,
  state: SelectionState,
): void {
  clear(container);
  container.appendChild(htmlEl("div", "view-title", "spatiotemporal summary"));
  if (!spatio) {
    container.appendChild(htmlEl("div", "placeholder", "select trials to summarize"));
    return;
  }
  const axes = spatio.radar.axes;
  const count = axes.length;
  const svg = svgEl("svg", {
    viewBox: `0 0 ${SIZE} ${SIZE}`,
    width: SIZE,
    height: SIZE,
    class: "radar-svg",
  });
  const tooltip = htmlEl("div", "tooltip");
  tooltip.style.display = "none";

  for (const ring of [0.25, 0.5, 0.75, 1.0]) {
    svg.appendChild(svgEl("polygon", {
      points: polygonPoints(axes.map((_, i) => axisPoint(i, count, RADIUS * ring))),
      class: "radar-grid",
      fill: "none",
    }));
  }
  axes.forEach((axis, i) => {
    const [x2, y2] = axisPoint(i, count, RADIUS);
    svg.appendChild(svgEl("line", {
      x1: CENTER, y1: CENTER, x2, y2, class: "radar-grid",
    }));
    const [lx, ly] = axisPoint(i, count, RADIUS + 14);
    const label = svgEl("text", {
      x: lx, y: ly, class: "radar-label", "text-anchor": "middle",
      "data-parameter": axis.parameter,
    });
    label.textContent = axis.parameter;
    label.addEventListener("mouseenter", () => {
      const a = axis.mean_a === null ? "-" : axis.mean_a.toFixed(3);
      const b = axis.mean_b === null ? "-" : axis.mean_b.toFixed(3);
      tooltip.textContent = `${axis.parameter}: A ${a}  B ${b}`;
      tooltip.style.display = "block";
    });
    label.addEventListener("mouseleave", () => (tooltip.style.display = "none"));
    svg.appendChild(label);
  });

  const polygon = (
    values: (number | null)[],
    cls: string,
    color: string,
    dashed: boolean,
    fillOpacity: number,
  ) => {
    const pts = values.map((v, i) => axisPoint(i, count, RADIUS * (v ?? 0)));
    return svgEl("polygon", {
      points: polygonPoints(pts),
      class: cls,
      stroke: color,
      fill: fillOpacity > 0 ? color : "none",
      "fill-opacity": fillOpacity,
      "stroke-width": dashed ? 2.4 : 1.8,
      ...(dashed ? { "stroke-dasharray": "6 4" } : {}),
    });
  };

  if (axes.some((a) => a.normalized_a !== null)) {
    svg.appendChild(
      polygon(axes.map((a) => a.normalized_a), "radar-a", GROUP_A_COLOR, false, 0.35),
    );
  }
  if (axes.some((a) => a.normalized_b !== null)) {
    svg.appendChild(
      polygon(axes.map((a) => a.normalized_b), "radar-b", GROUP_B_COLOR, false, 0.35),
    );
  }
  const overlay = highlightedRadarPolygon(spatio, state.highlighted);
  if (overlay) {
    svg.appendChild(polygon(overlay, "radar-highlight", "#333333", true, 0));
  }

  container.appendChild(svg);
  container.appendChild(tooltip);
}
