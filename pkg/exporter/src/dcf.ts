/**
 * DCF1 embedding interchange writer (plus a reader for verification).
 *
 * Little-endian layout:
 *   fixed header: magic "DCF1" | u16 version=1 | u16 reserved |
 *                 u32 dimension | u64 record count | u32 header JSON length
 *   header JSON:  {"dataset":...,"network":...,"sequences":[...]}
 *                 compact, keys sorted, UTF-8
 *   records:      u32 sequence index | u32 frame index | u8 metaclass
 *                 (0=TG, 1=BG) | u8 patch index | u16 reserved |
 *                 dimension x float32
 */

import { openSync, writeSync, closeSync, readFileSync } from 'node:fs';

export const MAGIC = 'DCF1';
export const VERSION = 1;
export const METACLASS_TG = 0;
export const METACLASS_BG = 1;

const HEADER_SIZE = 24;
const RECORD_FIXED_SIZE = 12;

export interface DcfRecord {
  sequenceIndex: number;
  frameIndex: number;
  metaclass: number;
  patchIndex: number;
  vector: Float32Array;
}

export interface DcfHeader {
  networkName: string;
  datasetName: string;
  dimension: number;
  sequenceTable: string[];
}

function headerJson(header: DcfHeader): Buffer {
  // key order dataset < network < sequences matches a sorted-keys writer
  const doc = {
    dataset: header.datasetName,
    network: header.networkName,
    sequences: header.sequenceTable,
  };
  return Buffer.from(JSON.stringify(doc), 'utf-8');
}

function packFixedHeader(header: DcfHeader, recordCount: number,
                         jsonLen: number): Buffer {
  const buf = Buffer.alloc(HEADER_SIZE);
  buf.write(MAGIC, 0, 'ascii');
  buf.writeUInt16LE(VERSION, 4);
  buf.writeUInt16LE(0, 6);
  buf.writeUInt32LE(header.dimension, 8);
  buf.writeBigUInt64LE(BigInt(recordCount), 12);
  buf.writeUInt32LE(jsonLen, 20);
  return buf;
}

function packRecord(rec: DcfRecord, dimension: number, k: number): Buffer {
  if (rec.vector.length !== dimension) {
    throw new Error(`record ${k}: vector length ${rec.vector.length} != dimension ${dimension}`);
  }
  for (const x of rec.vector) {
    if (!Number.isFinite(x)) {
      throw new Error(`record ${k}: non-finite vector component`);
    }
  }
  const buf = Buffer.alloc(RECORD_FIXED_SIZE + 4 * dimension);
  buf.writeUInt32LE(rec.sequenceIndex, 0);
  buf.writeUInt32LE(rec.frameIndex, 4);
  buf.writeUInt8(rec.metaclass, 8);
  buf.writeUInt8(rec.patchIndex, 9);
  buf.writeUInt16LE(0, 10);
  for (let i = 0; i < dimension; i++) {
    buf.writeFloatLE(rec.vector[i], RECORD_FIXED_SIZE + 4 * i);
  }
  return buf;
}

/**
 * Incremental single-owner writer: header first, then records in call
 * order. `close()` is mandatory and checks the declared count was met.
 */
export class DcfWriter {
  private fd: number;
  private header: DcfHeader;
  private declared: number;
  private written = 0;

  constructor(path: string, header: DcfHeader, recordCount: number) {
    if (header.dimension < 1) {
      throw new Error('dimension must be >= 1');
    }
    this.header = header;
    this.declared = recordCount;
    const json = headerJson(header);
    this.fd = openSync(path, 'w');
    writeSync(this.fd, packFixedHeader(header, recordCount, json.length));
    writeSync(this.fd, json);
  }

  writeRecord(rec: DcfRecord): void {
    if (rec.sequenceIndex >= this.header.sequenceTable.length) {
      throw new Error(`record ${this.written}: sequence index ${rec.sequenceIndex} ` +
        `outside table of ${this.header.sequenceTable.length}`);
    }
    writeSync(this.fd, packRecord(rec, this.header.dimension, this.written));
    this.written += 1;
  }

  close(): void {
    closeSync(this.fd);
    if (this.written !== this.declared) {
      throw new Error(`wrote ${this.written} records but declared ${this.declared}`);
    }
  }
}

export function writeDcf(path: string, header: DcfHeader, records: DcfRecord[]): void {
  const writer = new DcfWriter(path, header, records.length);
  for (const rec of records) {
    writer.writeRecord(rec);
  }
  writer.close();
}

export function readDcf(path: string): { header: DcfHeader; records: DcfRecord[] } {
  const raw = readFileSync(path);
  if (raw.length < HEADER_SIZE) {
    throw new Error('file shorter than the fixed header');
  }
  if (raw.toString('ascii', 0, 4) !== MAGIC) {
    throw new Error('not an embedding interchange file');
  }
  const version = raw.readUInt16LE(4);
  if (version !== VERSION) {
    throw new Error(`unsupported interchange version ${version}`);
  }
  const dimension = raw.readUInt32LE(8);
  if (dimension === 0) {
    throw new Error('dimension 0 in header');
  }
  const count = Number(raw.readBigUInt64LE(12));
  const jsonLen = raw.readUInt32LE(20);
  if (raw.length < HEADER_SIZE + jsonLen) {
    throw new Error('truncated inside the header JSON');
  }
  const doc = JSON.parse(raw.toString('utf-8', HEADER_SIZE, HEADER_SIZE + jsonLen));
  const header: DcfHeader = {
    networkName: doc.network,
    datasetName: doc.dataset,
    dimension,
    sequenceTable: doc.sequences,
  };
  const recordSize = RECORD_FIXED_SIZE + 4 * dimension;
  const records: DcfRecord[] = [];
  let off = HEADER_SIZE + jsonLen;
  for (let k = 0; k < count; k++) {
    if (off + recordSize > raw.length) {
      throw new Error(`truncated at record ${k}`);
    }
    const vector = new Float32Array(dimension);
    for (let i = 0; i < dimension; i++) {
      vector[i] = raw.readFloatLE(off + RECORD_FIXED_SIZE + 4 * i);
    }
    records.push({
      sequenceIndex: raw.readUInt32LE(off),
      frameIndex: raw.readUInt32LE(off + 4),
      metaclass: raw.readUInt8(off + 8),
      patchIndex: raw.readUInt8(off + 9),
      vector,
    });
    off += recordSize;
  }
  if (off !== raw.length) {
    throw new Error(`trailing bytes after the ${count} records declared in header`);
  }
  return { header, records };
}
