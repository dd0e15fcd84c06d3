import { execFileSync } from 'node:child_process';
import { readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';
import { beforeAll, describe, expect, it } from 'vitest';

import { readDcf } from '../src/dcf.js';
import { exportEmbeddings } from '../src/exporter.js';
import {
  FIXTURE_SPEC, makeCropFixture, makeGrayPng, writeFixtureModelDir,
  type CropFixture,
} from './fixtures.js';

let modelDir: string;
let crops: CropFixture;

beforeAll(async () => {
  modelDir = await writeFixtureModelDir();
  crops = makeCropFixture();
});

describe('exportEmbeddings', () => {
  it('writes one record per manifest entry, in manifest order', async () => {
    const out = join(crops.dir, 'fixture.dcf');
    const summary = await exportEmbeddings({
      manifestPath: crops.manifestPath,
      network: FIXTURE_SPEC,
      outPath: out,
      modelDir,
      batchSize: 5,
    });
    expect(summary).toMatchObject({
      network: 'fixture', dataset: 'demo', records: 12, dimension: 5, batches: 3,
    });

    const { header, records } = readDcf(out);
    expect(header.networkName).toBe('fixture');
    expect(header.datasetName).toBe('demo');
    expect(header.sequenceTable).toEqual(['alpha', 'beta']);
    expect(records).toHaveLength(12);
    records.forEach((rec, k) => {
      const entry = crops.entries[k];
      expect(header.sequenceTable[rec.sequenceIndex]).toBe(entry.seq);
      expect(rec.frameIndex).toBe(entry.frame);
      expect(rec.metaclass).toBe(entry.metaclass === 'TG' ? 0 : 1);
      expect(rec.patchIndex).toBe(entry.patch);
      expect(rec.vector).toHaveLength(5);
      expect(Array.from(rec.vector).every(Number.isFinite)).toBe(true);
    });
    const norms = records.map(r => Math.hypot(...Array.from(r.vector)));
    expect(Math.min(...norms)).toBeGreaterThan(0);
  });

  it('is insensitive to the batch size', async () => {
    const one = join(crops.dir, 'batch1.dcf');
    const all = join(crops.dir, 'batch12.dcf');
    await exportEmbeddings({ manifestPath: crops.manifestPath, network: FIXTURE_SPEC,
                             outPath: one, modelDir, batchSize: 1 });
    await exportEmbeddings({ manifestPath: crops.manifestPath, network: FIXTURE_SPEC,
                             outPath: all, modelDir, batchSize: 12 });
    const a = readDcf(one).records;
    const b = readDcf(all).records;
    a.forEach((rec, k) => {
      rec.vector.forEach((v, i) => {
        expect(Math.abs(v - b[k].vector[i])).toBeLessThan(1e-5);
      });
    });
  });

  it('reruns byte-identically', async () => {
    const first = join(crops.dir, 'rerun1.dcf');
    const second = join(crops.dir, 'rerun2.dcf');
    for (const out of [first, second]) {
      await exportEmbeddings({ manifestPath: crops.manifestPath, network: FIXTURE_SPEC,
                               outPath: out, modelDir, batchSize: 4 });
    }
    expect(readFileSync(first).equals(readFileSync(second))).toBe(true);
  });

  it('embeds the same solid-gray crop identically within one run', async () => {
    const gray = makeCropFixture();
    writeFileSync(join(gray.dir, 'gray.png'), makeGrayPng(9, 9, 128));
    const doc = JSON.parse(readFileSync(gray.manifestPath, 'utf-8'));
    doc.entries = [0, 1].map((id: number) => ({
      id, seq: 'solo', frame: id, metaclass: 'TG', patch: 0,
      file: 'gray.png', bbox: [0, 0, 9, 9], size: [9, 9],
    }));
    writeFileSync(gray.manifestPath, JSON.stringify(doc));

    const out = join(gray.dir, 'gray.dcf');
    await exportEmbeddings({ manifestPath: gray.manifestPath, network: FIXTURE_SPEC,
                             outPath: out, modelDir });
    const { records } = readDcf(out);
    expect(Array.from(records[0].vector)).toEqual(Array.from(records[1].vector));
  });

  it('aborts on an undecodable crop, naming the entry', async () => {
    const broken = makeCropFixture();
    const victim = broken.entries[3].file as string;
    writeFileSync(join(broken.dir, victim), Buffer.from('not a png'));
    await expect(exportEmbeddings({
      manifestPath: broken.manifestPath, network: FIXTURE_SPEC,
      outPath: join(broken.dir, 'broken.dcf'), modelDir,
    })).rejects.toThrow(new RegExp(`undecodable crop ${victim}`));
  });

  it('aborts when the probed dimension contradicts the network table', async () => {
    const wrong = { ...FIXTURE_SPEC, layerSelector: 'feat_a' };
    await expect(exportEmbeddings({
      manifestPath: crops.manifestPath, network: wrong,
      outPath: join(crops.dir, 'wrong.dcf'), modelDir,
    })).rejects.toThrow(/dimension probe mismatch.*pools to 4, network table says 5/);
  });

  it('a --layer override wins and the probed dimension is written', async () => {
    const out = join(crops.dir, 'override.dcf');
    const summary = await exportEmbeddings({
      manifestPath: crops.manifestPath, network: FIXTURE_SPEC,
      outPath: out, modelDir, layerOverride: 'feat_a',
    });
    expect(summary.dimension).toBe(4);
    expect(readDcf(out).header.dimension).toBe(4);
  });

  it('rejects a malformed manifest with the offending path', async () => {
    const bad = makeCropFixture();
    const doc = JSON.parse(readFileSync(bad.manifestPath, 'utf-8'));
    doc.entries[0].metaclass = 'XX';
    writeFileSync(bad.manifestPath, JSON.stringify(doc));
    await expect(exportEmbeddings({
      manifestPath: bad.manifestPath, network: FIXTURE_SPEC,
      outPath: join(bad.dir, 'bad.dcf'), modelDir,
    })).rejects.toThrow(/malformed manifest .*entries\.0\.metaclass/);
  });
});

function pythonReader(): string | null {
  try {
    execFileSync('python3', ['-c', 'import decafbench'], { stdio: 'ignore' });
    return 'python3';
  } catch {
    return null;
  }
}

describe('cross-implementation interchange', () => {
  it.skipIf(pythonReader() === null)(
    'files written here parse in the reference reader', async () => {
      const out = join(crops.dir, 'crosscheck.dcf');
      await exportEmbeddings({ manifestPath: crops.manifestPath, network: FIXTURE_SPEC,
                               outPath: out, modelDir });
      const script = [
        'import sys',
        'from decafbench.embedding import read_embeddings',
        'f = read_embeddings(sys.argv[1])',
        'print(f.network_name, f.dataset_name, f.dimension,',
        '      len(f.records), ",".join(f.sequence_table))',
      ].join('\n');
      const stdout = execFileSync('python3', ['-c', script, out], { encoding: 'utf-8' });
      expect(stdout.trim()).toBe('fixture demo 5 12 alpha,beta');
    });
});
