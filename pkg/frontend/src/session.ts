/** Review session: triage queue cursor and the corrections workflow. */

import { parseBundle, ReviewBundle, ReviewEpoch, StageCode } from "./bundle";
import {
  Correction,
  correctionsToCsv,
  parseCorrectionsCsv,
} from "./corrections";

export class ReviewSession {
  readonly bundle: ReviewBundle;
  readonly queue: number[]; // triaged epoch indices, ascending
  private cursor: number;
  private corrections = new Map<number, Correction>();
  private dirtyFlag = false;
  private byIndex = new Map<number, ReviewEpoch>();

  constructor(bundle: ReviewBundle) {
    this.bundle = bundle;
    for (const epoch of bundle.epochs) this.byIndex.set(epoch.index, epoch);
    this.queue = bundle.epochs
      .filter((e) => e.triaged)
      .map((e) => e.index)
      .sort((a, b) => a - b);
    this.cursor = 0;
  }

  static fromText(text: string): ReviewSession {
    return new ReviewSession(parseBundle(text));
  }

  get dirty(): boolean {
    return this.dirtyFlag;
  }

  epoch(index: number): ReviewEpoch {
    const epoch = this.byIndex.get(index);
    if (epoch === undefined) {
      throw new Error(`epoch ${index} not in bundle`);
    }
    return epoch;
  }

  /** Current queue entry, or null for an empty queue. */
  current(): ReviewEpoch | null {
    if (this.queue.length === 0) return null;
    return this.epoch(this.queue[this.cursor]);
  }

  next(): ReviewEpoch | null {
    if (this.queue.length === 0) return null;
    this.cursor = (this.cursor + 1) % this.queue.length;
    return this.current();
  }

  prev(): ReviewEpoch | null {
    if (this.queue.length === 0) return null;
    this.cursor = (this.cursor - 1 + this.queue.length) % this.queue.length;
    return this.current();
  }

  goTo(index: number): ReviewEpoch {
    const pos = this.queue.indexOf(index);
    if (pos >= 0) this.cursor = pos;
    return this.epoch(index);
  }

  correction(index: number): Correction | undefined {
    return this.corrections.get(index);
  }

  get correctionCount(): number {
    return this.corrections.size;
  }

  recordCorrection(
    index: number,
    stage: StageCode,
    note = "",
    timestamp = new Date().toISOString(),
  ): Correction {
    const epoch = this.epoch(index); // throws if unknown
    const correction: Correction = {
      epochIndex: index,
      originalStage: epoch.predicted_stage as StageCode,
      correctedStage: stage,
      note,
      timestamp,
    };
    this.corrections.set(index, correction);
    this.dirtyFlag = true;
    return correction;
  }

  /** CSV export; clears the dirty flag. */
  exportCorrections(): string {
    const csv = correctionsToCsv([...this.corrections.values()]);
    this.dirtyFlag = false;
    return csv;
  }

  /** Merge a previously exported file; latest (imported) wins per epoch. */
  importCorrections(text: string): number {
    const imported = parseCorrectionsCsv(text);
    for (const c of imported) {
      this.epoch(c.epochIndex); // corrections must reference bundle epochs
      this.corrections.set(c.epochIndex, c);
    }
    if (imported.length > 0) this.dirtyFlag = true;
    return imported.length;
  }
}
