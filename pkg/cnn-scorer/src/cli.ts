/** CLI: `train` fits the classifier from a manifest; `score` writes an
 * afford-scores/1 file for a manifest split using a saved model. */

import * as path from 'node:path';

import { forSplit, parseManifest } from './manifest.js';
import { atomicWrite, loadModel, saveModel, train } from './model.js';
import { scoreEntries, writeScoreFile } from './score.js';

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let k = 0; k < argv.length; k += 2) {
    const name = argv[k];
    if (!name.startsWith('--') || k + 1 >= argv.length) {
      throw new Error(`bad argument: ${name}`);
    }
    flags[name.slice(2)] = argv[k + 1];
  }
  return flags;
}

function required(flags: Flags, name: string): string {
  const value = flags[name];
  if (value === undefined) {
    throw new Error(`missing required flag --${name}`);
  }
  return value;
}

async function cmdTrain(flags: Flags): Promise<void> {
  const manifest = parseManifest(required(flags, 'manifest'));
  const modelDir = required(flags, 'model-dir');
  const seed = Number(flags['seed'] ?? '0');
  const epochs = Number(flags['epochs'] ?? '5');
  const { model, log } = await train(forSplit(manifest, 'train'), { seed, epochs });
  await saveModel(model, modelDir);
  atomicWrite(path.join(modelDir, 'train_log.json'), JSON.stringify(log, null, 2) + '\n');
  const finalAcc = log.accuracies[log.accuracies.length - 1];
  console.log(
    `trained on ${log.trainImages} images, ${epochs} epochs, ` +
      `final train accuracy ${finalAcc.toFixed(3)} -> ${modelDir}`,
  );
}

async function cmdScore(flags: Flags): Promise<void> {
  const manifest = parseManifest(required(flags, 'manifest'));
  const split = (flags['split'] ?? 'test') as 'train' | 'test';
  const out = required(flags, 'out');
  const model = await loadModel(required(flags, 'model-dir'));
  const result = scoreEntries(model, forSplit(manifest, split));
  writeScoreFile(result, out);
  console.log(
    `scored ${result.scored} images (${result.skipped.length} skipped) -> ${out}`,
  );
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    const flags = parseFlags(rest);
    if (command === 'train') {
      await cmdTrain(flags);
    } else if (command === 'score') {
      await cmdScore(flags);
    } else {
      console.error('usage: cnn-scorer {train|score} --manifest m.csv --model-dir dir ' +
        '[--seed N] [--epochs N] [--split train|test] [--out scores.jsonl]');
      return 2;
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
