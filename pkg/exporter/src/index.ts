export { NETWORKS, listNetworks, getNetwork } from './networks.js';
export type { NetworkSpec, PreprocessMode } from './networks.js';
export { preprocessBatch, resizeToInput } from './preprocess.js';
export { loadManifest, cropPath } from './manifest.js';
export type { CropManifest, ManifestEntry } from './manifest.js';
export { DcfWriter, writeDcf, readDcf, MAGIC, VERSION, METACLASS_TG, METACLASS_BG } from './dcf.js';
export type { DcfHeader, DcfRecord } from './dcf.js';
export { dirIOHandler, loadModel, saveModel, selectFeatureLayer, truncateAt, probeDimension } from './model.js';
export { exportEmbeddings } from './exporter.js';
export type { ExportOptions, ExportSummary } from './exporter.js';
export { selfcheck } from './selfcheck.js';
export type { SelfcheckReport, CheckResult } from './selfcheck.js';
