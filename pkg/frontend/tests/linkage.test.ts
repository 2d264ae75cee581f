/** Cross-view linking invariants exercised over the rendered DOM. */

import { beforeEach, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import { setGroupMembership, GROUP_A_COLOR, GROUP_B_COLOR } from "../src/state.js";
import type { TrialRef } from "../src/types.js";
import { FakeApi } from "./fake_api.js";
import selection from "./fixtures/selection.json";

const refsA = selection.trials_a as TrialRef[];
const refsB = selection.trials_b as TrialRef[];

async function mountApp(): Promise<{ app: App; root: HTMLElement }> {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  const app = new App(new FakeApi(), root);
  await app.start();
  app.dispatch(setGroupMembership(app.state, "a", refsA));
  app.dispatch(setGroupMembership(app.state, "b", refsB));
  await app.reloadData();
  return { app, root };
}

function highlightedPerView(root: HTMLElement): string[][] {
  return [...root.querySelectorAll(".ensemble-view")].map((view) =>
    [...view.querySelectorAll(".trial-line.highlighted")]
      .map((p) => p.getAttribute("data-ref")!)
      .sort(),
  );
}

describe("view consistency", () => {
  let app: App;
  let root: HTMLElement;

  beforeEach(async () => {
    ({ app, root } = await mountApp());
  });

  it("renders four time-series views with per-trial lines", () => {
    const views = root.querySelectorAll(".ensemble-view");
    expect(views.length).toBe(4);
    const lines = views[0].querySelectorAll(".trial-line");
    expect(lines.length).toBe(refsA.length + refsB.length);
  });

  it("group A renders green, group B orange", () => {
    const view = root.querySelectorAll(".ensemble-view")[0];
    const aLine = view.querySelector(".trial-line.group-a")!;
    const bLine = view.querySelector(".trial-line.group-b")!;
    expect(aLine.getAttribute("stroke")).toBe(GROUP_A_COLOR);
    expect(bLine.getAttribute("stroke")).toBe(GROUP_B_COLOR);
  });

  it("clicking a line bolds the same trial in every view and bands the boxes", () => {
    const view = root.querySelectorAll(".ensemble-view")[0];
    const line = view.querySelector(".trial-line")! as SVGPathElement;
    const key = line.getAttribute("data-ref")!;
    line.dispatchEvent(new MouseEvent("click"));

    const perView = highlightedPerView(root);
    expect(perView).toEqual([[key], [key], [key], [key]]);
    expect([...app.state.highlighted]).toEqual([key]);

    // distribution view shows a band; summary view shows the dashed overlay
    expect(root.querySelectorAll(".highlight-band").length).toBeGreaterThan(0);
    expect(root.querySelector(".radar-highlight")).not.toBeNull();

    line.dispatchEvent(new MouseEvent("click"));
    expect(highlightedPerView(root)).toEqual([[], [], [], []]);
    expect(root.querySelector(".radar-highlight")).toBeNull();
  });

  it("highlighted trials stay visible in confidence-band mode", () => {
    const view0 = root.querySelectorAll(".ensemble-view")[0];
    const line = view0.querySelector(".trial-line")! as SVGPathElement;
    const key = line.getAttribute("data-ref")!;
    line.dispatchEvent(new MouseEvent("click"));
    app.setConfig(0, { ...app.state.charts[0], showBand: true });

    const bandView = root.querySelectorAll(".ensemble-view")[0];
    expect(bandView.querySelectorAll(".ci-band").length).toBeGreaterThan(0);
    const bold = [...bandView.querySelectorAll(".trial-line.highlighted")].map((p) =>
      p.getAttribute("data-ref"),
    );
    expect(bold).toEqual([key]);
    // faded non-highlighted individuals are hidden in band mode
    expect(bandView.querySelectorAll(".trial-line:not(.highlighted)").length).toBe(0);
  });

  it("brushing highlights the same set in every view and draws the brush rect", () => {
    app.brush("gait_speed", 0.55, 0.65, "b");
    const slowKeys = refsB
      .filter((r) => r.patient_id !== "s05")
      .map((r) => `${r.group}/${r.patient_id}/${r.trial_id}`)
      .sort();
    const perView = highlightedPerView(root);
    for (const viewKeys of perView) {
      expect(viewKeys).toEqual(slowKeys);
    }
    const brushRect = root.querySelector(
      '.box-svg[data-parameter="gait_speed"] .brush-rect',
    );
    expect(brushRect).not.toBeNull();
    expect(brushRect!.getAttribute("data-group")).toBe("b");
    // the other box plots show the brushed trials' value range as a band
    expect(root.querySelector(
      '.box-svg[data-parameter="step_length_l"] .highlight-band',
    )).not.toBeNull();
    expect(root.querySelector(
      '.box-svg[data-parameter="gait_speed"] .highlight-band',
    )).toBeNull();
  });

  it("toggling video mode swaps the side pane without touching the selection", () => {
    app.brush("gait_speed", 0.55, 0.65, "b");
    const before = [...app.state.highlighted].sort();
    app.videoMode(true);
    expect(root.querySelector(".video-pane")).not.toBeNull();
    expect(root.querySelector(".radar-pane")).toBeNull();
    expect([...app.state.highlighted].sort()).toEqual(before);
    expect(app.state.brush).not.toBeNull();

    const cards = [...root.querySelectorAll(".video-card")];
    expect(cards.length).toBe(before.length);
    for (const card of cards) {
      expect(card.className).toContain("group-b");
    }
    app.videoMode(false);
    expect(root.querySelector(".radar-pane")).not.toBeNull();
    expect([...app.state.highlighted].sort()).toEqual(before);
  });

  it("hovering a line reveals the patient and trial id", () => {
    const view = root.querySelectorAll(".ensemble-view")[0];
    const line = view.querySelector('.trial-line[data-ref="healthy/h02/t1"]')!;
    line.dispatchEvent(new MouseEvent("mouseenter"));
    const tooltip = view.querySelector(".tooltip") as HTMLElement;
    expect(tooltip.style.display).toBe("block");
    expect(tooltip.textContent).toContain("h02");
    expect(tooltip.textContent).toContain("t1");
    line.dispatchEvent(new MouseEvent("mouseleave"));
    expect(tooltip.style.display).toBe("none");
  });

  it("playback marker appears at the mapped percent and hides off-cycle", async () => {
    const view = root.querySelectorAll(".ensemble-view")[0];
    const line = view.querySelector(".trial-line")! as SVGPathElement;
    line.dispatchEvent(new MouseEvent("click"));
    const ref = refsA[0];
    app.playback(ref, 1.2); // fixture window starts at 1.2 s
    await Promise.resolve();
    app.render();
    expect(root.querySelectorAll(".playback-marker").length).toBeGreaterThan(0);
    app.playback(ref, 99.0); // far outside the cycle window
    await Promise.resolve();
    app.render();
    expect(root.querySelectorAll(".playback-marker").length).toBe(0);
  });
});
