/**
 * Install health checks for one network: the selected layer pools to the
 * spec dimension, outputs are finite, and distinct inputs produce
 * distinct embeddings (nonzero variance across 8 random inputs).
 */

import * as tf from '@tensorflow/tfjs';

import { loadModel, probeDimension, selectFeatureLayer, truncateAt } from './model.js';
import type { NetworkSpec } from './networks.js';
import { preprocessBatch } from './preprocess.js';

export interface CheckResult {
  name: string;
  passed: boolean;
  detail: string;
}

export interface SelfcheckReport {
  network: string;
  passed: boolean;
  checks: CheckResult[];
}

function pooled(truncated: tf.LayersModel, spec: NetworkSpec,
                inputs: tf.Tensor4D): tf.Tensor2D {
  return tf.tidy(() => {
    const batch = preprocessBatch(inputs, spec.preprocess);
    const maps = truncated.predict(batch, { batchSize: inputs.shape[0] }) as tf.Tensor4D;
    return maps.mean([1, 2]) as tf.Tensor2D;
  });
}

export async function selfcheck(spec: NetworkSpec, modelDir: string,
                                layerOverride?: string): Promise<SelfcheckReport> {
  const model = await loadModel(modelDir);
  const layer = selectFeatureLayer(model, layerOverride ?? spec.layerSelector);
  const truncated = truncateAt(model, layer);
  const checks: CheckResult[] = [];

  const dimension = probeDimension(truncated, spec.inputSize);
  checks.push({
    name: 'dimension-probe',
    passed: dimension === spec.featureDimension,
    detail: `layer '${layer.name}' pools to ${dimension}, network table says ${spec.featureDimension}`,
  });

  const size = spec.inputSize;
  const single = tf.randomUniform([1, size, size, 3], 0, 255, 'float32', 7) as tf.Tensor4D;
  const vector = pooled(truncated, spec, single);
  const finite = (await vector.data()).every(Number.isFinite);
  single.dispose();
  vector.dispose();
  checks.push({
    name: 'finite-output',
    passed: finite,
    detail: finite ? 'all components finite on a random input'
                   : 'non-finite component on a random input',
  });

  const eight = tf.randomUniform([8, size, size, 3], 0, 255, 'float32', 11) as tf.Tensor4D;
  const vectors = pooled(truncated, spec, eight);
  const variance = tf.tidy(() => {
    const mean = vectors.mean(0);
    return vectors.sub(mean).square().mean(0).max();
  });
  const maxVar = (await variance.data())[0];
  eight.dispose();
  vectors.dispose();
  variance.dispose();
  const varies = Number.isFinite(maxVar) && maxVar > 0;
  checks.push({
    name: 'output-variance',
    passed: varies,
    detail: `max per-dimension variance across 8 random inputs: ${maxVar}`,
  });

  return {
    network: spec.name,
    passed: checks.every(c => c.passed),
    checks,
  };
}
