/**
 * Per-architecture input preprocessing, matching each network's
 * published training-time convention:
 *
 *   caffe: RGB -> BGR, subtract the ImageNet channel means (VGG19, ResNet50)
 *   tf:    scale to [-1, 1] (InceptionV3, MobileNet, NASNetLarge)
 *   torch: scale to [0, 1], normalize by ImageNet mean/std (DenseNet121)
 *
 * Input batches are float32 RGB in [0, 255], shape [n, h, w, 3].
 */

import * as tf from '@tensorflow/tfjs';
import type { PreprocessMode } from './networks.js';

const CAFFE_BGR_MEAN = [103.939, 116.779, 123.68];
const TORCH_MEAN = [0.485, 0.456, 0.406];
const TORCH_STD = [0.229, 0.224, 0.225];

export function preprocessBatch(rgb: tf.Tensor4D, mode: PreprocessMode): tf.Tensor4D {
  return tf.tidy(() => {
    switch (mode) {
      case 'caffe': {
        const bgr = tf.reverse(rgb, -1);
        return tf.sub(bgr, tf.tensor1d(CAFFE_BGR_MEAN)) as tf.Tensor4D;
      }
      case 'tf':
        return tf.sub(tf.div(rgb, 127.5), 1) as tf.Tensor4D;
      case 'torch': {
        const unit = tf.div(rgb, 255);
        return tf.div(tf.sub(unit, tf.tensor1d(TORCH_MEAN)),
                      tf.tensor1d(TORCH_STD)) as tf.Tensor4D;
      }
    }
  });
}

/** Bilinear resize to the network's square input; no-op if already sized. */
export function resizeToInput(rgb: tf.Tensor4D, inputSize: number): tf.Tensor4D {
  if (rgb.shape[1] === inputSize && rgb.shape[2] === inputSize) {
    return rgb;
  }
  return tf.image.resizeBilinear(rgb, [inputSize, inputSize]);
}
