import { describe, expect, it } from "vitest";

import { ReviewEpoch } from "../src/bundle";
import {
  confidenceTrace,
  hypnogramStrip,
  influenceBars,
  probabilityStack,
  signalWithHeatmap,
  upsampleHeatmap,
} from "../src/charts";

const epochs: ReviewEpoch[] = [0, 1, 2].map((i) => ({
  index: i,
  predicted_stage: i as ReviewEpoch["predicted_stage"],
  probs: [0.2, 0.2, 0.2, 0.2, 0.2],
  confidence: 0.5,
  triaged: false,
  transitioning: false,
}));

describe("overview strips", () => {
  it("hypnogram renders one rect per epoch", () => {
    const svg = hypnogramStrip(epochs);
    expect(svg.match(/<rect/g)).toHaveLength(3);
  });

  it("confidence trace shades below the threshold line", () => {
    const svg = confidenceTrace(epochs, 0.4);
    expect(svg).toContain("polyline");
    expect(svg).toContain("stroke-dasharray");
  });

  it("probability stack renders five segments per epoch", () => {
    const svg = probabilityStack(epochs);
    expect(svg.match(/<rect/g)).toHaveLength(15);
  });
});

describe("upsampleHeatmap", () => {
  it("covers the full signal with values in range", () => {
    const heat = Array.from({ length: 29 }, (_, t) => t / 28);
    const samples = upsampleHeatmap(heat);
    expect(samples).toHaveLength(3000);
    expect(Math.min(...samples)).toBeGreaterThanOrEqual(0);
    expect(Math.max(...samples)).toBeLessThanOrEqual(1);
  });

  it("edge hops take the single covering frame's weight", () => {
    const heat = new Array(29).fill(0);
    heat[0] = 1;
    const samples = upsampleHeatmap(heat);
    expect(samples[0]).toBeCloseTo(1);
    expect(samples[99]).toBeCloseTo(1);
    expect(samples[2999]).toBeCloseTo(0);
  });

  it("constant heatmap maps to a constant overlay", () => {
    const samples = upsampleHeatmap(new Array(29).fill(0.7));
    for (const v of [0, 500, 1500, 2999]) {
      expect(samples[v]).toBeCloseTo(0.7);
    }
  });
});

describe("detail panels", () => {
  it("signal renders without a heatmap overlay", () => {
    const svg = signalWithHeatmap([0, 1, -1, 0.5], undefined, 100, 50);
    expect(svg).toContain("polyline");
    expect(svg).not.toContain("opacity");
  });

  it("influence bars highlight the target epoch", () => {
    const svg = influenceBars([0.1, 0.8, 0.1], 10, 11);
    expect(svg.match(/<rect/g)).toHaveLength(3);
    expect(svg).toContain("#d9534f");
  });
});
