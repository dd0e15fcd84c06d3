/**
 * Model loading from a local directory plus feature-layer plumbing.
 *
 * Models live on disk in the standard layers-model layout: `model.json`
 * holding the topology and a weights manifest, weight shards as binary
 * files next to it. No downloading — point `--model-dir` at converted
 * pretrained weights.
 */

import { readFileSync, writeFileSync, mkdirSync } from 'node:fs';
import { join } from 'node:path';
import * as tf from '@tensorflow/tfjs';

function toArrayBuffer(buf: Buffer): ArrayBuffer {
  const out = new ArrayBuffer(buf.byteLength);
  new Uint8Array(out).set(buf);
  return out;
}

function concatWeightData(data: tf.io.WeightData | undefined): ArrayBuffer {
  if (!data) {
    throw new Error('model artifacts carry no weight data');
  }
  if (data instanceof ArrayBuffer) {
    return data;
  }
  const total = data.reduce((n, b) => n + b.byteLength, 0);
  const out = new Uint8Array(total);
  let off = 0;
  for (const part of data) {
    out.set(new Uint8Array(part), off);
    off += part.byteLength;
  }
  return out.buffer;
}

/** IOHandler over a plain directory: model.json + weight shard files. */
export function dirIOHandler(dir: string): tf.io.IOHandler {
  return {
    async load(): Promise<tf.io.ModelArtifacts> {
      const doc = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf-8'));
      const manifest: Array<{ paths: string[]; weights: tf.io.WeightsManifestEntry[] }> =
        doc.weightsManifest;
      const weightSpecs = manifest.flatMap(group => group.weights);
      const shards = manifest.flatMap(group => group.paths)
        .map(path => readFileSync(join(dir, path)));
      return {
        modelTopology: doc.modelTopology,
        weightSpecs,
        weightData: concatWeightData(shards.map(toArrayBuffer)),
      };
    },
    async save(artifacts: tf.io.ModelArtifacts): Promise<tf.io.SaveResult> {
      mkdirSync(dir, { recursive: true });
      const weightData = concatWeightData(artifacts.weightData);
      const doc = {
        modelTopology: artifacts.modelTopology,
        weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
      };
      writeFileSync(join(dir, 'model.json'), JSON.stringify(doc));
      writeFileSync(join(dir, 'weights.bin'), Buffer.from(weightData));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: 'JSON',
        },
      };
    },
  };
}

export async function loadModel(modelDir: string): Promise<tf.LayersModel> {
  return tf.loadLayersModel(dirIOHandler(modelDir));
}

export async function saveModel(model: tf.LayersModel, modelDir: string): Promise<void> {
  await model.save(dirIOHandler(modelDir));
}

/**
 * Resolve the feature layer: by name, or 'auto' for the deepest layer
 * with a 4-D (batch, h, w, channels) output.
 */
export function selectFeatureLayer(model: tf.LayersModel, selector: string): tf.layers.Layer {
  if (selector !== 'auto') {
    let layer: tf.layers.Layer;
    try {
      layer = model.getLayer(selector);
    } catch {
      throw new Error(`model has no layer named '${selector}'`);
    }
    assertSpatial(layer, selector);
    return layer;
  }
  for (let i = model.layers.length - 1; i >= 0; i--) {
    const shape = singleOutputShape(model.layers[i]);
    if (shape !== null && shape.length === 4) {
      return model.layers[i];
    }
  }
  throw new Error('model has no 4-D activation to pool');
}

function singleOutputShape(layer: tf.layers.Layer): Array<number | null> | null {
  const shape = layer.outputShape;
  return Array.isArray(shape[0]) ? null : (shape as Array<number | null>);
}

function assertSpatial(layer: tf.layers.Layer, selector: string): void {
  const shape = singleOutputShape(layer);
  if (shape === null || shape.length !== 4) {
    throw new Error(`layer '${selector}' output is not a 4-D feature map`);
  }
}

/** Submodel ending at the feature layer. */
export function truncateAt(model: tf.LayersModel, layer: tf.layers.Layer): tf.LayersModel {
  return tf.model({ inputs: model.inputs, outputs: layer.output as tf.SymbolicTensor });
}

/** Channel count observed on a real forward pass at the input size. */
export function probeDimension(truncated: tf.LayersModel, inputSize: number): number {
  return tf.tidy(() => {
    const probe = tf.zeros([1, inputSize, inputSize, 3]);
    const out = truncated.predict(probe) as tf.Tensor;
    if (out.shape.length !== 4) {
      throw new Error(`feature output has rank ${out.shape.length}, expected 4`);
    }
    return out.shape[3];
  });
}
