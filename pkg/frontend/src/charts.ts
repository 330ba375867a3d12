/** Pure SVG builders for the overview strips and the epoch detail panels.
 *
 * Everything returns markup strings so rendering stays testable without a
 * DOM; main.ts assigns them to innerHTML.
 */

import { ReviewEpoch, STAGE_NAMES } from "./bundle";

const STAGE_COLORS = ["#e6a817", "#8fbcd4", "#4a7db3", "#2b4d77", "#b35aa0"];

function polyline(points: string, stroke: string, width = 1): string {
  return `<polyline points="${points}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`;
}

export function svgOpen(w: number, h: number, cls: string): string {
  return `<svg viewBox="0 0 ${w} ${h}" preserveAspectRatio="none" class="${cls}">`;
}

/** Predicted-stage strip over the whole night, one column per epoch. */
export function hypnogramStrip(
  epochs: ReviewEpoch[],
  w = 960,
  h = 60,
): string {
  const dx = w / Math.max(epochs.length, 1);
  const parts = [svgOpen(w, h, "hypnogram")];
  for (let i = 0; i < epochs.length; i++) {
    const stage = epochs[i].predicted_stage;
    // W on top, deeper sleep lower, REM at the bottom row
    const y = (stage / 5) * h;
    parts.push(
      `<rect x="${(i * dx).toFixed(2)}" y="${y.toFixed(2)}" ` +
        `width="${Math.max(dx, 0.5).toFixed(2)}" height="${(h / 5).toFixed(2)}" ` +
        `fill="${STAGE_COLORS[stage]}"><title>epoch ${epochs[i].index}: ` +
        `${STAGE_NAMES[stage]}</title></rect>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

/** Confidence trace with the sub-threshold region shaded. */
export function confidenceTrace(
  epochs: ReviewEpoch[],
  threshold: number,
  w = 960,
  h = 80,
): string {
  const dx = w / Math.max(epochs.length - 1, 1);
  const points = epochs
    .map((e, i) => `${(i * dx).toFixed(2)},${((1 - e.confidence) * h).toFixed(2)}`)
    .join(" ");
  const ty = (1 - threshold) * h;
  return (
    svgOpen(w, h, "confidence") +
    `<rect x="0" y="${ty.toFixed(2)}" width="${w}" height="${(h - ty).toFixed(2)}" fill="#d9534f" opacity="0.15"/>` +
    `<line x1="0" y1="${ty.toFixed(2)}" x2="${w}" y2="${ty.toFixed(2)}" stroke="#d9534f" stroke-dasharray="4 3"/>` +
    polyline(points, "#333") +
    "</svg>"
  );
}

/** Stacked per-class probabilities over the night. */
export function probabilityStack(
  epochs: ReviewEpoch[],
  w = 960,
  h = 80,
): string {
  const dx = w / Math.max(epochs.length, 1);
  const parts = [svgOpen(w, h, "probstack")];
  for (let i = 0; i < epochs.length; i++) {
    let y = 0;
    for (let c = 0; c < 5; c++) {
      const seg = epochs[i].probs[c] * h;
      parts.push(
        `<rect x="${(i * dx).toFixed(2)}" y="${y.toFixed(2)}" ` +
          `width="${Math.max(dx, 0.5).toFixed(2)}" height="${seg.toFixed(2)}" ` +
          `fill="${STAGE_COLORS[c]}"/>`,
      );
      y += seg;
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

/** Expand 29 frame weights to n samples with linear cross-fades, mirroring
 * the producer's hop geometry (frame 200, hop 100). */
export function upsampleHeatmap(
  heatmap: number[],
  nSamples = 3000,
  frameLen = 200,
  hop = 100,
): number[] {
  const out = new Array<number>(nSamples).fill(0);
  const wsum = new Array<number>(nSamples).fill(0);
  for (let t = 0; t < heatmap.length; t++) {
    const start = t * hop;
    const end = Math.min(start + frameLen, nSamples);
    for (let s = start; s < end; s++) {
      const ramp = Math.min(s - start + 1, end - s);
      out[s] += heatmap[t] * ramp;
      wsum[s] += ramp;
    }
  }
  for (let s = 0; s < nSamples; s++) {
    if (wsum[s] > 0) out[s] /= wsum[s];
  }
  return out;
}

/** EEG trace with the attention heat map as a background intensity band. */
export function signalWithHeatmap(
  signal: number[],
  heatmap: number[] | undefined,
  w = 960,
  h = 140,
): string {
  const parts = [svgOpen(w, h, "signal")];
  if (heatmap !== undefined) {
    const weights = upsampleHeatmap(heatmap, signal.length);
    const bands = 120; // coarse overlay, one rect per band
    const span = signal.length / bands;
    for (let b = 0; b < bands; b++) {
      const weight = weights[Math.floor(b * span)];
      parts.push(
        `<rect x="${((b / bands) * w).toFixed(2)}" y="0" ` +
          `width="${(w / bands).toFixed(2)}" height="${h}" ` +
          `fill="#d9534f" opacity="${(0.35 * weight).toFixed(3)}"/>`,
      );
    }
  }
  const peak = Math.max(...signal.map(Math.abs), 1e-9);
  const dx = w / Math.max(signal.length - 1, 1);
  const points = signal
    .map((v, i) => `${(i * dx).toFixed(2)},${((1 - v / peak) * h * 0.5).toFixed(2)}`)
    .join(" ");
  parts.push(polyline(points, "#1a1a1a", 0.7), "</svg>");
  return parts.join("");
}

/** Influence of each context epoch on the inspected one (bar chart). */
export function influenceBars(
  weights: number[],
  windowOffset: number,
  target: number,
  w = 480,
  h = 120,
): string {
  const dx = w / Math.max(weights.length, 1);
  const peak = Math.max(...weights, 1e-9);
  const parts = [svgOpen(w, h, "influence")];
  for (let j = 0; j < weights.length; j++) {
    const bar = (weights[j] / peak) * (h - 14);
    const epochIndex = windowOffset + j;
    const fill = epochIndex === target ? "#d9534f" : "#4a7db3";
    parts.push(
      `<rect x="${(j * dx + 1).toFixed(2)}" y="${(h - bar).toFixed(2)}" ` +
        `width="${(dx - 2).toFixed(2)}" height="${bar.toFixed(2)}" fill="${fill}">` +
        `<title>epoch ${epochIndex}: ${weights[j].toFixed(4)}</title></rect>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function probabilityTable(epoch: ReviewEpoch): string {
  const rows = STAGE_NAMES.map((name, c) => {
    const mark = c === epoch.predicted_stage ? " class=\"predicted\"" : "";
    return `<tr${mark}><td>${name}</td><td>${epoch.probs[c].toFixed(4)}</td></tr>`;
  }).join("");
  return `<table class="probs"><tbody>${rows}</tbody></table>`;
}
