#!/usr/bin/env node
/**
 * decaf-export: crop manifest -> DCF1 embedding file through one
 * pretrained network.
 *
 *   decaf-export --manifest crops/manifest.json --network VGG19 \
 *       --model-dir models/vgg19 --out vgg19.dcf --batch 32
 *   decaf-export --network VGG19 --model-dir models/vgg19 --selfcheck
 *   decaf-export --list-networks
 *
 * Exit codes: 0 success, 1 selfcheck failure, 2 anything else.
 */

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { exportEmbeddings } from './exporter.js';
import { getNetwork, listNetworks } from './networks.js';
import { selfcheck } from './selfcheck.js';

async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .scriptName('decaf-export')
    .option('manifest', { type: 'string', describe: 'path to crops/manifest.json' })
    .option('network', { type: 'string', describe: 'network name (see --list-networks)' })
    .option('out', { type: 'string', describe: 'output .dcf path' })
    .option('model-dir', { type: 'string', describe: 'directory with model.json + weights' })
    .option('batch', { type: 'number', default: 32, describe: 'inference batch size' })
    .option('layer', { type: 'string', describe: 'feature-layer override' })
    .option('selfcheck', { type: 'boolean', default: false, describe: 'run install checks instead of exporting' })
    .option('list-networks', { type: 'boolean', default: false, describe: 'print the supported networks' })
    .strict()
    .help()
    .fail((msg, err) => { throw err ?? new Error(msg); })
    .parse();

  if (args.listNetworks) {
    for (const spec of listNetworks()) {
      console.log(`${spec.name.padEnd(12)} input ${spec.inputSize}px  D=${spec.featureDimension}  ` +
        `layer ${spec.layerSelector}  preprocess ${spec.preprocess}`);
    }
    return 0;
  }

  if (!args.network) {
    throw new Error('--network is required');
  }
  const spec = getNetwork(args.network);
  if (!args.modelDir) {
    throw new Error('--model-dir is required');
  }

  if (args.selfcheck) {
    const report = await selfcheck(spec, args.modelDir, args.layer);
    for (const check of report.checks) {
      console.log(`${check.passed ? 'PASS' : 'FAIL'} ${check.name}: ${check.detail}`);
    }
    console.log(`${report.network}: ${report.passed ? 'healthy' : 'UNHEALTHY'}`);
    return report.passed ? 0 : 1;
  }

  if (!args.manifest || !args.out) {
    throw new Error('--manifest and --out are required for export');
  }
  const summary = await exportEmbeddings({
    manifestPath: args.manifest,
    network: spec,
    outPath: args.out,
    modelDir: args.modelDir,
    batchSize: args.batch,
    layerOverride: args.layer,
  });
  console.log(`${summary.network}: ${summary.records} records, D=${summary.dimension}, ` +
    `${summary.batches} batches -> ${args.out}`);
  return 0;
}

main(hideBin(process.argv))
  .then(code => { process.exitCode = code; })
  .catch(err => {
    console.error(`decaf-export: ${(err as Error).message}`);
    process.exitCode = 2;
  });
