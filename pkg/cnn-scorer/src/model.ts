/** A small seeded CNN over 32x32 RGB crops, with file-based save/load that
 * works without a native tfjs backend. */

import * as fs from 'node:fs';
import * as path from 'node:path';

import * as tf from '@tensorflow/tfjs';

import { INPUT_SIZE, ImageError, loadImageTensor } from './images.js';
import { ManifestEntry } from './manifest.js';
import { FOCUS_LABELS } from './taxonomy.js';

export interface TrainOptions {
  seed: number;
  epochs: number;
  batchSize?: number;
  learningRate?: number;
}

export interface TrainLog {
  seed: number;
  epochs: number;
  losses: number[];
  accuracies: number[];
  trainImages: number;
}

export function buildModel(seed: number): tf.LayersModel {
  const init = (offset: number) => tf.initializers.glorotUniform({ seed: seed + offset });
  const model = tf.sequential({
    layers: [
      tf.layers.conv2d({
        inputShape: [INPUT_SIZE, INPUT_SIZE, 3],
        filters: 8,
        kernelSize: 3,
        activation: 'relu',
        kernelInitializer: init(1),
      }),
      tf.layers.maxPooling2d({ poolSize: 2 }),
      tf.layers.conv2d({
        filters: 16,
        kernelSize: 3,
        activation: 'relu',
        kernelInitializer: init(2),
      }),
      tf.layers.maxPooling2d({ poolSize: 2 }),
      tf.layers.flatten(),
      tf.layers.dense({ units: 32, activation: 'relu', kernelInitializer: init(3) }),
      tf.layers.dense({
        units: FOCUS_LABELS.length,
        activation: 'softmax',
        kernelInitializer: init(4),
      }),
    ],
  });
  return model;
}

export interface LoadedBatch {
  x: tf.Tensor4D;
  y: tf.Tensor2D;
  entries: ManifestEntry[];
  skipped: { path: string; reason: string }[];
}

/** Stack readable images into one batch; unreadable ones are reported back. */
export function loadBatch(entries: ManifestEntry[], skipUnreadable = false): LoadedBatch {
  const tensors: tf.Tensor3D[] = [];
  const kept: ManifestEntry[] = [];
  const skipped: { path: string; reason: string }[] = [];
  for (const entry of entries) {
    try {
      tensors.push(loadImageTensor(entry.path));
      kept.push(entry);
    } catch (err) {
      if (!skipUnreadable) {
        for (const t of tensors) t.dispose();
        throw err;
      }
      const reason = err instanceof Error ? err.message : String(err);
      skipped.push({ path: entry.path, reason });
    }
  }
  if (kept.length === 0) {
    throw new ImageError('no readable images in the batch');
  }
  const x = tf.stack(tensors) as tf.Tensor4D;
  for (const t of tensors) t.dispose();
  const labels = kept.map((e) => FOCUS_LABELS.indexOf(e.grasp));
  const y = tf.oneHot(tf.tensor1d(labels, 'int32'), FOCUS_LABELS.length) as tf.Tensor2D;
  return { x, y, entries: kept, skipped };
}

export async function train(
  trainEntries: ManifestEntry[],
  options: TrainOptions,
): Promise<{ model: tf.LayersModel; log: TrainLog }> {
  const model = buildModel(options.seed);
  model.compile({
    optimizer: tf.train.adam(options.learningRate ?? 1e-3),
    loss: 'categoricalCrossentropy',
    metrics: ['accuracy'],
  });
  const batch = loadBatch(trainEntries);
  try {
    const history = await model.fit(batch.x, batch.y, {
      epochs: options.epochs,
      batchSize: options.batchSize ?? 16,
      shuffle: false, // keep the loss sequence reproducible for a fixed seed
      verbose: 0,
    });
    const losses = (history.history.loss as number[]).map(Number);
    const accuracies = ((history.history.acc ?? history.history.accuracy ?? []) as number[]).map(
      Number,
    );
    return {
      model,
      log: {
        seed: options.seed,
        epochs: options.epochs,
        losses,
        accuracies,
        trainImages: batch.entries.length,
      },
    };
  } finally {
    batch.x.dispose();
    batch.y.dispose();
  }
}

const TOPOLOGY_FILE = 'model.json';
const WEIGHTS_FILE = 'weights.bin';

export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = artifacts.weightData as ArrayBuffer;
      const meta = {
        modelTopology: artifacts.modelTopology,
        weightSpecs: artifacts.weightSpecs,
        format: artifacts.format,
        generatedBy: artifacts.generatedBy,
        convertedBy: artifacts.convertedBy ?? null,
      };
      atomicWrite(path.join(dir, TOPOLOGY_FILE), JSON.stringify(meta));
      atomicWrite(path.join(dir, WEIGHTS_FILE), Buffer.from(weightData));
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' } };
    }),
  );
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const metaPath = path.join(dir, TOPOLOGY_FILE);
  const weightsPath = path.join(dir, WEIGHTS_FILE);
  if (!fs.existsSync(metaPath) || !fs.existsSync(weightsPath)) {
    throw new Error(`model artifact missing under ${dir}`);
  }
  const meta = JSON.parse(fs.readFileSync(metaPath, 'utf-8'));
  const weights = fs.readFileSync(weightsPath);
  return tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: meta.modelTopology,
      weightSpecs: meta.weightSpecs,
      weightData: weights.buffer.slice(
        weights.byteOffset,
        weights.byteOffset + weights.byteLength,
      ),
    }),
  );
}

export function atomicWrite(filePath: string, data: string | Buffer): void {
  const tmp = `${filePath}.${process.pid}.tmp`;
  fs.writeFileSync(tmp, data);
  fs.renameSync(tmp, filePath);
}
