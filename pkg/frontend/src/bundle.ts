/** Review-bundle schema and validated loading. */

import { z } from "zod";

export const SCHEMA_VERSION = 1;

export const STAGE_NAMES = ["W", "N1", "N2", "N3", "REM"] as const;
export type StageCode = 0 | 1 | 2 | 3 | 4;

const stageCode = z.number().int().min(0).max(4);

const influenceSchema = z.object({
  weights: z.array(z.number()),
  window_offset: z.number().int().min(0),
});

export const epochSchema = z.object({
  index: z.number().int().min(0),
  predicted_stage: stageCode,
  probs: z.array(z.number()).length(5),
  confidence: z.number().min(0).max(1),
  triaged: z.boolean(),
  transitioning: z.boolean(),
  true_stage: stageCode.optional(),
  heatmap: z.array(z.number()).optional(),
  heatmap_degenerate: z.boolean().optional(),
  influence: influenceSchema.optional(),
  attended_eeg: z.array(z.number()).optional(),
  raw_eeg: z.array(z.number()).optional(),
});

export const bundleSchema = z.object({
  schema_version: z.number().int(),
  recording_id: z.string(),
  epochs: z.array(epochSchema),
});

export type ReviewEpoch = z.infer<typeof epochSchema>;
export type ReviewBundle = z.infer<typeof bundleSchema>;

export class BundleError extends Error {}

/** Parse and validate bundle text; throws BundleError, never partial data. */
export function parseBundle(text: string): ReviewBundle {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new BundleError(`not valid JSON: ${(err as Error).message}`);
  }
  const version = (raw as { schema_version?: unknown })?.schema_version;
  if (version !== SCHEMA_VERSION) {
    throw new BundleError(
      `unsupported schema_version ${String(version)}, expected ${SCHEMA_VERSION}`,
    );
  }
  const result = bundleSchema.safeParse(raw);
  if (!result.success) {
    const issue = result.error.issues[0];
    throw new BundleError(
      `invalid bundle at ${issue.path.join(".") || "root"}: ${issue.message}`,
    );
  }
  const indices = new Set(result.data.epochs.map((e) => e.index));
  if (indices.size !== result.data.epochs.length) {
    throw new BundleError("duplicate epoch indices in bundle");
  }
  return result.data;
}
