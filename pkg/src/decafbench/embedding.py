"""The DCF1 embedding interchange format and a synthetic Gaussian provider.

The feature-extractor boundary is a file: any provider that can write this
layout plugs into the analysis core. All integers are little-endian.

    magic "DCF1" | version u16 = 1 | reserved u16 = 0 | dimension u32 |
    record_count u64 | header_json_len u32 | header JSON | records

    record: sequence_index u32 | frame_index u32 | metaclass u8 |
            patch_index u8 | reserved u16 = 0 | dimension x f32

The header JSON is {"dataset": ..., "network": ..., "sequences": [...]}
in compact form with sorted keys, so writes are byte-deterministic.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from decafbench.errors import InputError
from decafbench.rng import fnv1a64, standard_normal_block, stream_u64
from decafbench.sampling import SampleSet

MAGIC = b"DCF1"
VERSION = 1

METACLASS_TG = 0
METACLASS_BG = 1
METACLASS_NAMES = {METACLASS_TG: "TG", METACLASS_BG: "BG"}
METACLASS_CODES = {"TG": METACLASS_TG, "BG": METACLASS_BG}

_HEADER_FMT = "<4sHHIQI"
_HEADER_SIZE = struct.calcsize(_HEADER_FMT)
_RECORD_FIXED_FMT = "<IIBBH"
_RECORD_FIXED_SIZE = struct.calcsize(_RECORD_FIXED_FMT)

_SAMPLE_TAG = fnv1a64("sample-noise")


class EmbeddingFormatError(InputError):
    """A DCF1 file violates the interchange layout."""


class BadMagicError(EmbeddingFormatError):
    pass


class UnsupportedVersionError(EmbeddingFormatError):
    pass


class BadDimensionError(EmbeddingFormatError):
    pass


class TruncatedFileError(EmbeddingFormatError):
    pass


class RecordCountMismatchError(EmbeddingFormatError):
    pass


@dataclass
class EmbeddingRecord:
    sequence_index: int
    frame_index: int
    metaclass: int  # METACLASS_TG | METACLASS_BG
    patch_index: int
    vector: np.ndarray  # float32, length = file dimension


@dataclass
class EmbeddingFile:
    network_name: str
    dataset_name: str
    dimension: int
    sequence_table: list[str]
    records: list[EmbeddingRecord] = field(default_factory=list)


def _validate_for_write(file: EmbeddingFile) -> None:
    if file.dimension < 1:
        raise BadDimensionError("dimension must be >= 1")
    for k, rec in enumerate(file.records):
        if len(rec.vector) != file.dimension:
            raise InputError(f"record {k}: vector length {len(rec.vector)} != "
                             f"dimension {file.dimension}")
        if not np.all(np.isfinite(rec.vector)):
            raise InputError(f"record {k}: non-finite vector component")
        if rec.sequence_index >= len(file.sequence_table):
            raise InputError(f"record {k}: sequence index {rec.sequence_index} "
                             f"outside table of {len(file.sequence_table)}")


def _header_json(file: EmbeddingFile) -> bytes:
    doc = {
        "dataset": file.dataset_name,
        "network": file.network_name,
        "sequences": list(file.sequence_table),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def write_embeddings(file: EmbeddingFile, path: Path | str) -> None:
    """Write the DCF1 layout; byte-deterministic for a given EmbeddingFile."""
    _validate_for_write(file)
    header = _header_json(file)
    with open(path, "wb") as out:
        out.write(struct.pack(_HEADER_FMT, MAGIC, VERSION, 0, file.dimension,
                              len(file.records), len(header)))
        out.write(header)
        for rec in file.records:
            out.write(struct.pack(_RECORD_FIXED_FMT, rec.sequence_index,
                                  rec.frame_index, rec.metaclass, rec.patch_index, 0))
            out.write(np.asarray(rec.vector, dtype="<f4").tobytes())


def _read_header(handle) -> tuple[str, str, list[str], int, int]:
    raw = handle.read(_HEADER_SIZE)
    if len(raw) < _HEADER_SIZE:
        raise TruncatedFileError("file shorter than the fixed header")
    magic, version, _reserved, dimension, count, json_len = struct.unpack(_HEADER_FMT, raw)
    if magic != MAGIC:
        raise BadMagicError("not an embedding interchange file")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported interchange version {version}")
    if dimension == 0:
        raise BadDimensionError("dimension 0 in header")
    header_raw = handle.read(json_len)
    if len(header_raw) < json_len:
        raise TruncatedFileError("truncated inside the header JSON")
    try:
        doc = json.loads(header_raw.decode("utf-8"))
        network = doc["network"]
        dataset = doc["dataset"]
        sequences = list(doc["sequences"])
    except (ValueError, KeyError) as exc:
        raise EmbeddingFormatError(f"malformed header JSON: {exc}") from exc
    return network, dataset, sequences, dimension, count


def iter_embeddings(path: Path | str) -> tuple[EmbeddingFile, Iterator[EmbeddingRecord]]:
    """Open a DCF1 file for streaming: header now, records lazily.

    The returned EmbeddingFile has an empty record list; drain the iterator
    to consume the file. Truncation and count mismatches raise during
    iteration, at the record where they are detected.
    """
    handle = open(path, "rb")
    try:
        network, dataset, sequences, dimension, count = _read_header(handle)
    except Exception:
        handle.close()
        raise
    header = EmbeddingFile(network, dataset, dimension, sequences)
    record_size = _RECORD_FIXED_SIZE + 4 * dimension

    def records() -> Iterator[EmbeddingRecord]:
        try:
            for k in range(count):
                raw = handle.read(record_size)
                if len(raw) < record_size:
                    raise TruncatedFileError(f"truncated at record {k}")
                seq_idx, frame_idx, metaclass, patch, _res = struct.unpack(
                    _RECORD_FIXED_FMT, raw[:_RECORD_FIXED_SIZE])
                if seq_idx >= len(sequences):
                    raise EmbeddingFormatError(
                        f"record {k}: sequence index {seq_idx} outside header table")
                vector = np.frombuffer(raw, dtype="<f4", offset=_RECORD_FIXED_SIZE)
                if not np.all(np.isfinite(vector)):
                    raise EmbeddingFormatError(f"record {k}: non-finite component")
                yield EmbeddingRecord(seq_idx, frame_idx, metaclass, patch,
                                      vector.copy())
            if handle.read(1):
                raise RecordCountMismatchError(
                    f"trailing bytes after the {count} records declared in header")
        finally:
            handle.close()

    return header, records()


def read_embeddings(path: Path | str) -> EmbeddingFile:
    """Read and fully validate a DCF1 file."""
    header, records = iter_embeddings(path)
    header.records = list(records)
    return header


@dataclass(frozen=True)
class SyntheticSpec:
    """Isotropic Gaussian class-manifold generator parameters."""

    dimension: int
    seed: int
    centroid_scale: float = 10.0
    within_class_sigma: float = 1.0
    network_name: str = "synthetic"
    dataset_name: str = "synthetic"

    def __post_init__(self):
        if self.dimension < 2:
            raise InputError("synthetic dimension must be >= 2")
        if self.within_class_sigma < 0:
            raise InputError("within_class_sigma must be >= 0")


def class_centroid(spec: SyntheticSpec, sequence_name: str, metaclass: int) -> np.ndarray:
    """Deterministic unit direction scaled by centroid_scale for one class."""
    base = spec.seed ^ fnv1a64(sequence_name)
    class_key = stream_u64(base, metaclass)
    direction = standard_normal_block(class_key, 0, spec.dimension)
    norm = float(np.linalg.norm(direction))
    return (spec.centroid_scale / norm) * direction


def synthetic_embed(spec: SyntheticSpec, sequence_name: str, metaclass: int,
                    frame_index: int, patch_index: int) -> np.ndarray:
    """centroid + sigma * g with g keyed by (class, frame, patch); reproducible."""
    centroid = class_centroid(spec, sequence_name, metaclass)
    if spec.within_class_sigma == 0:
        return centroid
    base = spec.seed ^ fnv1a64(sequence_name)
    class_key = stream_u64(base, metaclass)
    sample_key = stream_u64(class_key ^ _SAMPLE_TAG, frame_index * 65536 + patch_index)
    g = standard_normal_block(sample_key, 0, spec.dimension)
    return centroid + spec.within_class_sigma * g


def generate_synthetic_file(spec: SyntheticSpec, sample_sets: list[SampleSet],
                            bg_patches_per_sample: int = 4) -> EmbeddingFile:
    """One record per (sample, TG) and per (sample, BG patch), manifest order."""
    if not sample_sets or all(not s.samples for s in sample_sets):
        raise InputError("no samples to embed")
    ordered = sorted(sample_sets, key=lambda s: s.sequence_name)
    table = [s.sequence_name for s in ordered]
    if len(set(table)) != len(table):
        raise InputError("duplicate sequence names across sample sets")
    records: list[EmbeddingRecord] = []
    for seq_idx, sample_set in enumerate(ordered):
        name = sample_set.sequence_name
        for sample in sample_set.samples:
            vec = synthetic_embed(spec, name, METACLASS_TG, sample.frame_index, 0)
            records.append(EmbeddingRecord(seq_idx, sample.frame_index, METACLASS_TG,
                                           0, vec.astype(np.float32)))
            for patch in range(bg_patches_per_sample):
                vec = synthetic_embed(spec, name, METACLASS_BG, sample.frame_index,
                                      patch)
                records.append(EmbeddingRecord(seq_idx, sample.frame_index,
                                               METACLASS_BG, patch,
                                               vec.astype(np.float32)))
    return EmbeddingFile(
        network_name=spec.network_name,
        dataset_name=spec.dataset_name,
        dimension=spec.dimension,
        sequence_table=table,
        records=records,
    )


def load_synthetic_spec(path: Path | str) -> SyntheticSpec:
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    try:
        return SyntheticSpec(
            dimension=doc["dimension"],
            seed=doc["seed"],
            centroid_scale=doc.get("centroid_scale", 10.0),
            within_class_sigma=doc.get("within_class_sigma", 1.0),
            network_name=doc.get("network", "synthetic"),
            dataset_name=doc.get("dataset", "synthetic"),
        )
    except KeyError as exc:
        raise InputError(f"{path}: synthetic spec missing field {exc}") from exc
