/** Runs a trained model over manifest entries and writes an afford-scores/1
 * file: a taxonomy header line plus one softmax posterior per image. */

import * as path from 'node:path';

import * as tf from '@tensorflow/tfjs';

import { loadImageTensor } from './images.js';
import { ManifestEntry } from './manifest.js';
import { atomicWrite } from './model.js';
import { FOCUS_LABELS } from './taxonomy.js';

export const SCORES_FORMAT = 'afford-scores/1';

export interface ScoreResult {
  lines: string[];
  scored: number;
  skipped: { path: string; reason: string }[];
}

export function scoreEntries(model: tf.LayersModel, entries: ManifestEntry[]): ScoreResult {
  const lines: string[] = [
    JSON.stringify({ format: SCORES_FORMAT, taxonomy: FOCUS_LABELS }),
  ];
  const skipped: { path: string; reason: string }[] = [];
  const seenIds = new Set<string>();
  for (const entry of entries) {
    let input: tf.Tensor3D;
    try {
      input = loadImageTensor(entry.path);
    } catch (err) {
      skipped.push({
        path: entry.path,
        reason: err instanceof Error ? err.message : String(err),
      });
      continue;
    }
    const probs = tf.tidy(() => {
      const batched = input.expandDims(0);
      const out = model.predict(batched) as tf.Tensor2D;
      return Array.from(out.dataSync());
    });
    input.dispose();
    const total = probs.reduce((a, b) => a + b, 0);
    const normalized = probs.map((p) => p / total); // float32 outputs drift past 1e-6
    let imageId = path.basename(entry.path);
    if (seenIds.has(imageId)) {
      imageId = entry.path;
    }
    seenIds.add(imageId);
    lines.push(
      JSON.stringify({
        image_id: imageId,
        object: entry.object,
        true_grasp: entry.grasp,
        scores: normalized,
      }),
    );
  }
  return { lines, scored: lines.length - 1, skipped };
}

export function writeScoreFile(result: ScoreResult, outPath: string): void {
  atomicWrite(outPath, result.lines.join('\n') + '\n');
  if (result.skipped.length > 0) {
    const sidecar = result.skipped
      .map((s) => `${s.path}\t${s.reason}`)
      .join('\n');
    atomicWrite(outPath + '.skipped.log', sidecar + '\n');
  }
}
