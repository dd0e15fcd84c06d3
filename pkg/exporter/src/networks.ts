/**
 * The six supported ImageNet architectures and their feature taps.
 *
 * `layerSelector` names the deepest convolutional feature map in the
 * Keras layer naming scheme; 'auto' picks the last 4-D activation at
 * load time (NASNetLarge's internal names vary between conversions).
 * `featureDimension` is the channel count of that map, which becomes
 * the embedding dimension after global average pooling.
 */

export type PreprocessMode = 'caffe' | 'tf' | 'torch';

export interface NetworkSpec {
  name: string;
  /** square input edge in pixels */
  inputSize: number;
  /** pooled embedding dimension (channels of the selected layer) */
  featureDimension: number;
  /** Keras layer name, or 'auto' for the deepest 4-D activation */
  layerSelector: string;
  preprocess: PreprocessMode;
}

export const NETWORKS: readonly NetworkSpec[] = [
  { name: 'VGG19', inputSize: 224, featureDimension: 512, layerSelector: 'block5_conv4', preprocess: 'caffe' },
  { name: 'InceptionV3', inputSize: 299, featureDimension: 2048, layerSelector: 'mixed10', preprocess: 'tf' },
  { name: 'ResNet50', inputSize: 224, featureDimension: 2048, layerSelector: 'conv5_block3_out', preprocess: 'caffe' },
  { name: 'DenseNet121', inputSize: 224, featureDimension: 1024, layerSelector: 'relu', preprocess: 'torch' },
  { name: 'MobileNet', inputSize: 224, featureDimension: 1024, layerSelector: 'conv_pw_13_relu', preprocess: 'tf' },
  { name: 'NASNetLarge', inputSize: 331, featureDimension: 4032, layerSelector: 'auto', preprocess: 'tf' },
];

export function listNetworks(): NetworkSpec[] {
  return NETWORKS.map(spec => ({ ...spec }));
}

export function getNetwork(name: string): NetworkSpec {
  const spec = NETWORKS.find(s => s.name.toLowerCase() === name.toLowerCase());
  if (!spec) {
    const known = NETWORKS.map(s => s.name).join(', ');
    throw new Error(`unknown network '${name}' (one of: ${known})`);
  }
  return { ...spec };
}
