/**
 * Manifest -> embeddings: decode each crop, resize to the network input,
 * preprocess, forward to the feature layer, global-average-pool, and
 * write one DCF1 record per manifest entry, in manifest order.
 */

import { readFileSync } from 'node:fs';
import * as tf from '@tensorflow/tfjs';
import { PNG } from 'pngjs';

import { DcfWriter, METACLASS_BG, METACLASS_TG } from './dcf.js';
import { cropPath, loadManifest, type CropManifest, type ManifestEntry } from './manifest.js';
import { loadModel, probeDimension, selectFeatureLayer, truncateAt } from './model.js';
import type { NetworkSpec } from './networks.js';
import { preprocessBatch, resizeToInput } from './preprocess.js';

export interface ExportOptions {
  manifestPath: string;
  network: NetworkSpec;
  outPath: string;
  /** directory holding model.json + weight shards for the network */
  modelDir: string;
  batchSize?: number;
  /** feature-layer override; the probed dimension then wins over the network table */
  layerOverride?: string;
}

export interface ExportSummary {
  network: string;
  dataset: string;
  records: number;
  dimension: number;
  batches: number;
}

interface DecodedCrop {
  height: number;
  width: number;
  /** RGB float32 in [0, 255], row-major */
  data: Float32Array;
}

function decodeCrop(path: string, entry: ManifestEntry): DecodedCrop {
  let png: PNG;
  try {
    png = PNG.sync.read(readFileSync(path));
  } catch (err) {
    throw new Error(`undecodable crop ${entry.file}: ${(err as Error).message}`);
  }
  const n = png.width * png.height;
  const rgb = new Float32Array(n * 3);
  for (let i = 0; i < n; i++) {
    rgb[3 * i] = png.data[4 * i];
    rgb[3 * i + 1] = png.data[4 * i + 1];
    rgb[3 * i + 2] = png.data[4 * i + 2];
  }
  return { height: png.height, width: png.width, data: rgb };
}

function embedBatch(truncated: tf.LayersModel, crops: DecodedCrop[],
                    spec: NetworkSpec): Promise<Float32Array> {
  const features = tf.tidy(() => {
    const resized = crops.map(crop => {
      const img = tf.tensor3d(crop.data, [crop.height, crop.width, 3])
        .expandDims(0) as tf.Tensor4D;
      return resizeToInput(img, spec.inputSize);
    });
    const batch = preprocessBatch(tf.concat(resized, 0) as tf.Tensor4D, spec.preprocess);
    const maps = truncated.predict(batch, { batchSize: crops.length }) as tf.Tensor4D;
    return maps.mean([1, 2]) as tf.Tensor2D;
  });
  return features.data().then(data => {
    features.dispose();
    return data as Float32Array;
  });
}

export async function exportEmbeddings(opts: ExportOptions): Promise<ExportSummary> {
  const spec = opts.network;
  const batchSize = opts.batchSize ?? 32;
  if (batchSize < 1) {
    throw new Error('batch size must be >= 1');
  }
  const manifest: CropManifest = loadManifest(opts.manifestPath);

  const model = await loadModel(opts.modelDir);
  const layer = selectFeatureLayer(model, opts.layerOverride ?? spec.layerSelector);
  const truncated = truncateAt(model, layer);
  const dimension = probeDimension(truncated, spec.inputSize);
  if (!opts.layerOverride && dimension !== spec.featureDimension) {
    throw new Error(`dimension probe mismatch for ${spec.name}: ` +
      `layer '${layer.name}' pools to ${dimension}, network table says ${spec.featureDimension}`);
  }

  const seqIndex = new Map(manifest.sequenceTable.map((name, i) => [name, i]));
  const writer = new DcfWriter(opts.outPath, {
    networkName: spec.name,
    datasetName: manifest.dataset,
    dimension,
    sequenceTable: manifest.sequenceTable,
  }, manifest.entries.length);

  let batches = 0;
  for (let start = 0; start < manifest.entries.length; start += batchSize) {
    const entries = manifest.entries.slice(start, start + batchSize);
    const crops = entries.map(entry => decodeCrop(cropPath(manifest, entry), entry));
    const data = await embedBatch(truncated, crops, spec);
    entries.forEach((entry, i) => {
      writer.writeRecord({
        sequenceIndex: seqIndex.get(entry.seq)!,
        frameIndex: entry.frame,
        metaclass: entry.metaclass === 'TG' ? METACLASS_TG : METACLASS_BG,
        patchIndex: entry.patch,
        vector: data.subarray(i * dimension, (i + 1) * dimension),
      });
    });
    batches += 1;
  }
  writer.close();

  return {
    network: spec.name,
    dataset: manifest.dataset,
    records: manifest.entries.length,
    dimension,
    batches,
  };
}
