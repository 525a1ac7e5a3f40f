/** Dataset manifest: CSV `path,grasp,object,split`, one image per row. */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { FOCUS_LABELS, GraspLabel, isGraspLabel } from './taxonomy.js';

export type Split = 'train' | 'test';

export interface ManifestEntry {
  path: string;
  grasp: GraspLabel;
  object: string;
  split: Split;
}

export class ManifestError extends Error {}

export function parseManifest(manifestPath: string): ManifestEntry[] {
  const text = fs.readFileSync(manifestPath, 'utf-8');
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new ManifestError(`${manifestPath}: empty manifest`);
  }
  if (lines[0].trim() !== 'path,grasp,object,split') {
    throw new ManifestError(
      `${manifestPath}: line 1: expected header 'path,grasp,object,split'`,
    );
  }
  const baseDir = path.dirname(manifestPath);
  const entries: ManifestEntry[] = [];
  const seen = new Set<string>();
  for (let k = 1; k < lines.length; k++) {
    const lineno = k + 1;
    const fields = lines[k].split(',');
    if (fields.length !== 4) {
      throw new ManifestError(
        `${manifestPath}: line ${lineno}: expected 4 fields, got ${fields.length}`,
      );
    }
    const [rawPath, grasp, object, split] = fields.map((f) => f.trim());
    if (!isGraspLabel(grasp)) {
      throw new ManifestError(
        `${manifestPath}: line ${lineno}: unknown grasp label '${grasp}'`,
      );
    }
    if (split !== 'train' && split !== 'test') {
      throw new ManifestError(
        `${manifestPath}: line ${lineno}: split must be 'train' or 'test'`,
      );
    }
    const resolved = path.isAbsolute(rawPath) ? rawPath : path.join(baseDir, rawPath);
    if (seen.has(resolved)) {
      throw new ManifestError(
        `${manifestPath}: line ${lineno}: image path appears twice: ${rawPath}`,
      );
    }
    seen.add(resolved);
    entries.push({ path: resolved, grasp, object, split });
  }
  validateSplits(entries, manifestPath);
  return entries;
}

/** Each class must have at least one image in each split; the duplicate-path
 * check above already guarantees the splits cannot leak. */
function validateSplits(entries: ManifestEntry[], manifestPath: string): void {
  for (const split of ['train', 'test'] as const) {
    for (const label of FOCUS_LABELS) {
      const n = entries.filter((e) => e.split === split && e.grasp === label).length;
      if (n === 0) {
        throw new ManifestError(
          `${manifestPath}: class '${label}' has no images in the ${split} split`,
        );
      }
    }
  }
}

export function forSplit(entries: ManifestEntry[], split: Split): ManifestEntry[] {
  return entries.filter((e) => e.split === split);
}
