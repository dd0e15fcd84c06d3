/**
 * The crop manifest contract: `manifest.json` next to the crop PNGs,
 * one entry per patch in (sequence, sample, metaclass, patch) order.
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { z } from 'zod';

const entrySchema = z.object({
  id: z.number().int().nonnegative(),
  seq: z.string().min(1),
  frame: z.number().int().nonnegative(),
  metaclass: z.enum(['TG', 'BG']),
  patch: z.number().int().nonnegative(),
  file: z.string().min(1),
  bbox: z.array(z.number()).length(4),
  size: z.array(z.number().int().positive()).length(2),
});

const manifestSchema = z.object({
  dataset: z.string().min(1),
  entries: z.array(entrySchema).min(1),
});

export type ManifestEntry = z.infer<typeof entrySchema>;

export interface CropManifest {
  dataset: string;
  /** entries in file order; record order must follow it exactly */
  entries: ManifestEntry[];
  /** directory holding the crop files */
  baseDir: string;
  /** sorted unique sequence names (the DCF1 header table) */
  sequenceTable: string[];
}

export function loadManifest(manifestPath: string): CropManifest {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(manifestPath, 'utf-8'));
  } catch (err) {
    throw new Error(`unreadable manifest ${manifestPath}: ${(err as Error).message}`);
  }
  const parsed = manifestSchema.safeParse(doc);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new Error(
      `malformed manifest ${manifestPath}: ${issue.path.join('.')}: ${issue.message}`);
  }
  const { dataset, entries } = parsed.data;
  const sequenceTable = [...new Set(entries.map(e => e.seq))].sort();
  return { dataset, entries, baseDir: dirname(manifestPath), sequenceTable };
}

export function cropPath(manifest: CropManifest, entry: ManifestEntry): string {
  return join(manifest.baseDir, entry.file);
}
