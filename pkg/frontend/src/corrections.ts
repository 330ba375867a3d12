/** Corrections CSV: `epoch_index,original_stage,corrected_stage,note,timestamp`. */

import { StageCode } from "./bundle";

export interface Correction {
  epochIndex: number;
  originalStage: StageCode;
  correctedStage: StageCode;
  note: string;
  timestamp: string; // ISO 8601
}

export const CSV_HEADER =
  "epoch_index,original_stage,corrected_stage,note,timestamp";

function escapeField(value: string): string {
  if (/[",\n\r]/.test(value)) {
    return `"${value.replace(/"/g, '""')}"`;
  }
  return value;
}

export function correctionsToCsv(corrections: Correction[]): string {
  const rows = [CSV_HEADER];
  const ordered = [...corrections].sort((a, b) => a.epochIndex - b.epochIndex);
  for (const c of ordered) {
    rows.push(
      [
        String(c.epochIndex),
        String(c.originalStage),
        String(c.correctedStage),
        escapeField(c.note),
        c.timestamp,
      ].join(","),
    );
  }
  return rows.join("\n") + "\n";
}

/** Split one CSV line honoring quoted fields; returns null on open quote. */
function splitLine(line: string): string[] | null {
  const fields: string[] = [];
  let current = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"' && line[i + 1] === '"') {
        current += '"';
        i++;
      } else if (ch === '"') {
        quoted = false;
      } else {
        current += ch;
      }
    } else if (ch === '"' && current === "") {
      quoted = true;
    } else if (ch === ",") {
      fields.push(current);
      current = "";
    } else {
      current += ch;
    }
  }
  if (quoted) return null;
  fields.push(current);
  return fields;
}

function parseStage(text: string, line: number): StageCode {
  const value = Number(text);
  if (!Number.isInteger(value) || value < 0 || value > 4) {
    throw new Error(`line ${line}: invalid stage code ${text}`);
  }
  return value as StageCode;
}

export function parseCorrectionsCsv(text: string): Correction[] {
  // a quoted note may span physical lines; re-join until quotes balance
  const physical = text.replace(/\r\n/g, "\n").split("\n");
  if (physical.length === 0 || physical[0].trim() !== CSV_HEADER) {
    throw new Error(`expected header '${CSV_HEADER}'`);
  }
  const out: Correction[] = [];
  let pending = "";
  let lineNo = 1;
  for (const piece of physical.slice(1)) {
    pending = pending === "" ? piece : pending + "\n" + piece;
    lineNo++;
    if (pending.trim() === "") {
      pending = "";
      continue;
    }
    const fields = splitLine(pending);
    if (fields === null) continue; // note continues on the next line
    if (fields.length !== 5) {
      throw new Error(`line ${lineNo}: expected 5 fields, got ${fields.length}`);
    }
    const epochIndex = Number(fields[0]);
    if (!Number.isInteger(epochIndex) || epochIndex < 0) {
      throw new Error(`line ${lineNo}: invalid epoch index ${fields[0]}`);
    }
    out.push({
      epochIndex,
      originalStage: parseStage(fields[1], lineNo),
      correctedStage: parseStage(fields[2], lineNo),
      note: fields[3],
      timestamp: fields[4],
    });
    pending = "";
  }
  if (pending !== "") throw new Error("unterminated quoted field");
  return out;
}
