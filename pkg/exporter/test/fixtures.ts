/**
 * Shared test fixtures: a tiny deterministic layers model exercising the
 * real load -> select -> truncate -> pool path, plus PNG crops and a
 * manifest in the interchange layout.
 */

import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import * as tf from '@tensorflow/tfjs';
import { PNG } from 'pngjs';

import { saveModel } from '../src/model.js';
import type { NetworkSpec } from '../src/networks.js';

export const FIXTURE_SPEC: NetworkSpec = {
  name: 'fixture',
  inputSize: 8,
  featureDimension: 5,
  layerSelector: 'feat_b',
  preprocess: 'tf',
};

export type ModelVariant = 'healthy' | 'nan-weight' | 'zero-weights';

/** RGB input -> conv 'feat_a' (D=4) -> conv 'feat_b' (D=5) -> GAP -> dense head */
export function makeFixtureModel(variant: ModelVariant = 'healthy'): tf.LayersModel {
  const model = tf.sequential({
    layers: [
      tf.layers.conv2d({
        inputShape: [null as unknown as number, null as unknown as number, 3],
        filters: 4, kernelSize: 1, padding: 'same',
        activation: 'relu', name: 'feat_a',
      }),
      tf.layers.conv2d({
        filters: 5, kernelSize: 3, padding: 'same', name: 'feat_b',
      }),
      tf.layers.globalAveragePooling2d({ name: 'gap' }),
      tf.layers.dense({ units: 2, name: 'head' }),
    ],
  });
  for (const layer of model.layers) {
    const shaped = layer.getWeights().map((w, k) => {
      const values = new Float32Array(w.size);
      for (let i = 0; i < w.size; i++) {
        values[i] = variant === 'zero-weights'
          ? 0
          : Math.sin(1 + 0.7 * i + 2.3 * k) * 0.4;
      }
      if (variant === 'nan-weight' && layer.name === 'feat_b' && k === 0) {
        values[0] = NaN;
      }
      return tf.tensor(values, w.shape);
    });
    layer.setWeights(shaped);
  }
  return model;
}

export async function writeFixtureModelDir(variant: ModelVariant = 'healthy'): Promise<string> {
  const dir = mkdtempSync(join(tmpdir(), 'decaf-export-model-'));
  const model = makeFixtureModel(variant);
  await saveModel(model, dir);
  model.dispose();
  return dir;
}

export function makePng(width: number, height: number, seed: number): Buffer {
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    png.data[4 * i] = (i * 7 + seed) % 256;
    png.data[4 * i + 1] = (i * 11 + 2 * seed) % 256;
    png.data[4 * i + 2] = (i * 13 + 3 * seed) % 256;
    png.data[4 * i + 3] = 255;
  }
  return PNG.sync.write(png);
}

export function makeGrayPng(width: number, height: number, value: number): Buffer {
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    png.data[4 * i] = value;
    png.data[4 * i + 1] = value;
    png.data[4 * i + 2] = value;
    png.data[4 * i + 3] = 255;
  }
  return PNG.sync.write(png);
}

export interface CropFixture {
  dir: string;
  manifestPath: string;
  entries: Array<Record<string, unknown>>;
}

/**
 * Two sequences x two samples x (1 TG + 2 BG) = 12 entries, written in
 * (seq, id, metaclass, patch) order like the producing side does.
 */
export function makeCropFixture(): CropFixture {
  const dir = mkdtempSync(join(tmpdir(), 'decaf-export-crops-'));
  const entries: Array<Record<string, unknown>> = [];
  let seed = 1;
  for (const [seqIdx, seq] of ['alpha', 'beta'].entries()) {
    const size = seq === 'alpha' ? [10, 8] : [12, 12];
    for (let sample = 0; sample < 2; sample++) {
      const frame = 3 * sample + seqIdx;
      for (const [metaclass, patches] of [['TG', 1], ['BG', 2]] as const) {
        for (let patch = 0; patch < patches; patch++) {
          const file = `${seq}_${String(frame).padStart(6, '0')}_${metaclass}_${patch}.png`;
          writeFileSync(join(dir, file), makePng(size[0], size[1], seed++));
          entries.push({
            id: sample,
            seq,
            frame,
            metaclass,
            patch,
            file,
            bbox: [10 + patch, 20, size[0], size[1]],
            size,
          });
        }
      }
    }
  }
  const manifestPath = join(dir, 'manifest.json');
  writeFileSync(manifestPath, JSON.stringify({ dataset: 'demo', entries }, null, 2));
  return { dir, manifestPath, entries };
}
