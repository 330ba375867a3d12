import { describe, expect, it } from "vitest";

import { BundleError, parseBundle, ReviewEpoch } from "../src/bundle";
import {
  CSV_HEADER,
  correctionsToCsv,
  parseCorrectionsCsv,
} from "../src/corrections";
import { ReviewSession } from "../src/session";

function makeEpoch(index: number, overrides: Partial<ReviewEpoch> = {}): ReviewEpoch {
  return {
    index,
    predicted_stage: (index % 5) as ReviewEpoch["predicted_stage"],
    probs: [0.6, 0.1, 0.1, 0.1, 0.1],
    confidence: 0.8,
    triaged: false,
    transitioning: false,
    ...overrides,
  };
}

function makeBundle(nEpochs: number, triaged: number[]): string {
  const triagedSet = new Set(triaged);
  return JSON.stringify({
    schema_version: 1,
    recording_id: "rec-test",
    epochs: Array.from({ length: nEpochs }, (_, i) =>
      makeEpoch(i, {
        triaged: triagedSet.has(i),
        confidence: triagedSet.has(i) ? 0.2 : 0.8,
      }),
    ),
  });
}

describe("parseBundle", () => {
  it("accepts a valid bundle", () => {
    const bundle = parseBundle(makeBundle(4, [1]));
    expect(bundle.recording_id).toBe("rec-test");
    expect(bundle.epochs).toHaveLength(4);
  });

  it("rejects malformed JSON with a parse message", () => {
    expect(() => parseBundle("{not json")).toThrow(BundleError);
    expect(() => parseBundle("{not json")).toThrow(/JSON/);
  });

  it("rejects unsupported schema versions", () => {
    const text = JSON.stringify({ schema_version: 9, recording_id: "x", epochs: [] });
    expect(() => parseBundle(text)).toThrow(/schema_version 9/);
  });

  it("rejects invalid epochs with a field path and loads nothing partial", () => {
    const doc = JSON.parse(makeBundle(2, []));
    doc.epochs[1].probs = [1.0];
    expect(() => parseBundle(JSON.stringify(doc))).toThrow(/epochs.1.probs/);
  });

  it("rejects duplicate epoch indices", () => {
    const doc = JSON.parse(makeBundle(2, []));
    doc.epochs[1].index = 0;
    expect(() => parseBundle(JSON.stringify(doc))).toThrow(/duplicate/);
  });
});

describe("ReviewSession queue", () => {
  it("queue holds exactly the triaged epochs ordered by index", () => {
    const session = ReviewSession.fromText(makeBundle(10, [7, 2, 5]));
    expect(session.queue).toEqual([2, 5, 7]);
    expect(session.current()?.index).toBe(2);
  });

  it("empty queue yields null current", () => {
    const session = ReviewSession.fromText(makeBundle(5, []));
    expect(session.queue).toHaveLength(0);
    expect(session.current()).toBeNull();
    expect(session.next()).toBeNull();
  });

  it("next and prev wrap around", () => {
    const session = ReviewSession.fromText(makeBundle(10, [1, 4, 8]));
    expect(session.next()?.index).toBe(4);
    expect(session.next()?.index).toBe(8);
    expect(session.next()?.index).toBe(1);
    expect(session.prev()?.index).toBe(8);
  });

  it("loads 1000 epochs with 100 triaged in under two seconds", () => {
    const triaged = Array.from({ length: 100 }, (_, i) => i * 10);
    const text = makeBundle(1000, triaged);
    const start = performance.now();
    const session = ReviewSession.fromText(text);
    const elapsed = performance.now() - start;
    expect(session.queue).toHaveLength(100);
    expect(elapsed).toBeLessThan(2000);
  });
});

describe("corrections", () => {
  it("recording a correction sets the dirty flag, export clears it", () => {
    const session = ReviewSession.fromText(makeBundle(5, [1]));
    expect(session.dirty).toBe(false);
    session.recordCorrection(1, 3, "spindles visible", "2026-01-01T00:00:00Z");
    expect(session.dirty).toBe(true);
    const csv = session.exportCorrections();
    expect(session.dirty).toBe(false);
    expect(csv).toBe(
      `${CSV_HEADER}\n1,1,3,spindles visible,2026-01-01T00:00:00Z\n`,
    );
  });

  it("export with no corrections is header-only", () => {
    const session = ReviewSession.fromText(makeBundle(3, []));
    expect(session.exportCorrections()).toBe(`${CSV_HEADER}\n`);
  });

  it("rejects corrections for epochs not in the bundle", () => {
    const session = ReviewSession.fromText(makeBundle(3, []));
    expect(() => session.recordCorrection(99, 2)).toThrow(/99/);
  });

  it("import merges by epoch index with the imported row winning", () => {
    const session = ReviewSession.fromText(makeBundle(5, [0, 1]));
    session.recordCorrection(1, 2, "old", "2026-01-01T00:00:00Z");
    const imported =
      `${CSV_HEADER}\n` +
      `1,1,4,new call,2026-01-02T00:00:00Z\n` +
      `3,3,0,,2026-01-02T00:01:00Z\n`;
    expect(session.importCorrections(imported)).toBe(2);
    expect(session.correction(1)?.correctedStage).toBe(4);
    expect(session.correction(1)?.note).toBe("new call");
    expect(session.correctionCount).toBe(2);
  });

  it("export then import then export is lossless, including tricky notes", () => {
    const session = ReviewSession.fromText(makeBundle(6, []));
    session.recordCorrection(0, 1, 'note with "quotes", commas', "2026-01-01T00:00:00Z");
    session.recordCorrection(2, 4, "line\nbreak", "2026-01-01T00:01:00Z");
    session.recordCorrection(5, 0, "", "2026-01-01T00:02:00Z");
    const exported = session.exportCorrections();
    const other = ReviewSession.fromText(makeBundle(6, []));
    other.importCorrections(exported);
    expect(other.exportCorrections()).toBe(exported);
  });

  it("rejects a CSV with the wrong header or bad stages", () => {
    expect(() => parseCorrectionsCsv("epoch,stage\n")).toThrow(/header/);
    expect(() =>
      parseCorrectionsCsv(`${CSV_HEADER}\n0,1,7,x,t\n`),
    ).toThrow(/stage/);
  });

  it("csv roundtrip preserves arbitrary note text", () => {
    const corrections = [
      {
        epochIndex: 3,
        originalStage: 2 as const,
        correctedStage: 1 as const,
        note: ',"",\n\n"x,y"',
        timestamp: "2026-02-01T10:00:00Z",
      },
    ];
    expect(parseCorrectionsCsv(correctionsToCsv(corrections))).toEqual(corrections);
  });
});
