/**
 * Video exploration view: scrollable cards for the highlighted trials,
 * color-coded by patient group, each playing the trial video via the
 * range-serving endpoint.  Playback drives the circular markers on the
 * time-series views through the onPlayback callback.
 */

import type { TrialRef } from "../types.js";
import { refKey, type SelectionState } from "../state.js";
import { clear, htmlEl } from "./svg.js";

export interface VideoCallbacks {
  videoUrl(ref: TrialRef): string;
  onPlayback(ref: TrialRef, t: number): void;
  onPlaybackEnd(): void;
}

export function renderVideoView(
  container: HTMLElement,
  state: SelectionState,
  selectedRefs: TrialRef[],
  callbacks: VideoCallbacks,
): void {
  clear(container);
  container.appendChild(htmlEl("div", "view-title", "video exploration"));
  const shown = selectedRefs.filter((ref) => state.highlighted.has(refKey(ref)));
  if (!shown.length) {
    container.appendChild(htmlEl(
      "div", "placeholder",
      "click trials in the time-series views to load their videos",
    ));
    return;
  }
  const listing = htmlEl("div", "video-list");
  for (const ref of shown) {
    const inGroupA = state.groupA.some((r) => refKey(r) === refKey(ref));
    const card = htmlEl("div", `video-card ${inGroupA ? "group-a" : "group-b"}`);
    card.setAttribute("data-ref", refKey(ref));
    card.appendChild(htmlEl(
      "div", "video-card-header",
      `${ref.patient_id} / ${ref.trial_id} - ${ref.group}`,
    ));
    const video = document.createElement("video");
    video.setAttribute("controls", "");
    video.setAttribute("preload", "metadata");
    video.src = callbacks.videoUrl(ref);
    video.className = "video-player";
    video.addEventListener("timeupdate", () =>
      callbacks.onPlayback(ref, video.currentTime),
    );
    video.addEventListener("pause", () => callbacks.onPlaybackEnd());
    video.addEventListener("ended", () => callbacks.onPlaybackEnd());
    card.appendChild(video);
    listing.appendChild(card);
  }
  container.appendChild(listing);
}
