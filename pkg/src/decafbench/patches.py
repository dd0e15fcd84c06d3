"""Target / background patch materialization and the crop manifest.

Backgrounds are the four same-size flanking boxes (left, right, up, down)
of a sample's target box; flanks that leave the frame or touch the
sequence's annotated target box are dropped, which guarantees BG patches
never contain target pixels. Crops are written as lossless PNGs plus a
manifest.json that any embedding provider can consume.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from decafbench.dataset import BoundingBox, DatasetCatalog
from decafbench.errors import InputError
from decafbench.sampling import SampleSet

log = logging.getLogger("decafbench.patches")

TG = "TG"
BG = "BG"
_METACLASS_ORDER = {TG: 0, BG: 1}

MIN_CROP_AREA = 16.0


@dataclass(frozen=True)
class PatchSpec:
    sample_id: int
    sequence_name: str
    frame_index: int
    metaclass: str  # TG | BG
    patch_index: int  # 0 for TG; stable 0..3 flank slot for BG
    region: BoundingBox


@dataclass(frozen=True)
class ManifestEntry:
    spec: PatchSpec
    crop_file: str
    crop_size: tuple[int, int]


@dataclass
class CropManifest:
    manifest_path: Path
    dataset_name: str
    entries: list[ManifestEntry]


def background_regions(target: BoundingBox,
                       frame_size: tuple[float, float]) -> list[tuple[int, BoundingBox]]:
    """Four target-size flanks, one box-width/height away, frame-clipped.

    Returns (patch_index, box) pairs; indices stay stable (0=left, 1=right,
    2=up, 3=down) when a candidate is discarded for leaving the frame.
    """
    fw, fh = frame_size
    candidates = [
        (0, BoundingBox(target.x - target.w, target.y, target.w, target.h)),
        (1, BoundingBox(target.x + target.w, target.y, target.w, target.h)),
        (2, BoundingBox(target.x, target.y - target.h, target.w, target.h)),
        (3, BoundingBox(target.x, target.y + target.h, target.w, target.h)),
    ]
    return [
        (idx, box)
        for idx, box in candidates
        if box.x >= 0 and box.y >= 0 and box.x + box.w <= fw and box.y + box.h <= fh
    ]


def rasterize_region(region: BoundingBox,
                     image_size: tuple[int, int]) -> tuple[int, int, int, int]:
    """Integer pixel rect (x0, y0, x1, y1) covering a continuous box."""
    w, h = image_size
    x0 = max(int(math.floor(region.x)), 0)
    y0 = max(int(math.floor(region.y)), 0)
    x1 = min(int(math.ceil(region.x + region.w)), w)
    y1 = min(int(math.ceil(region.y + region.h)), h)
    return x0, y0, x1, y1


def extract_crop(image: np.ndarray, region: BoundingBox, label: str = "") -> np.ndarray:
    """Pixel-exact sub-raster of ``image`` (H x W [x C]); no resizing."""
    h, w = image.shape[0], image.shape[1]
    x0, y0, x1, y1 = rasterize_region(region, (w, h))
    if x1 <= x0 or y1 <= y0 or (x1 - x0) * (y1 - y0) < MIN_CROP_AREA:
        raise InputError(
            f"crop region {region.as_list()} degenerate after clamping"
            + (f" (sample {label})" if label else "")
        )
    return image[y0:y1, x0:x1].copy()


def _annotation_box(catalog: DatasetCatalog, seq_name: str,
                    frame_index: int) -> BoundingBox | None:
    seq = catalog.sequence(seq_name)
    if frame_index >= len(seq.frames):
        raise InputError(f"{seq_name}: sample frame {frame_index} beyond sequence")
    return seq.frames[frame_index].bbox


def plan_patches(catalog: DatasetCatalog, sample_sets: list[SampleSet]) -> list[PatchSpec]:
    """Resolve sample sets into ordered patch specs (no pixel I/O).

    Order is (sequence, sample_id, TG-before-BG, patch_index); BG flanks
    intersecting the frame's annotated target box are dropped so noised
    samples cannot leak target pixels into backgrounds.
    """
    specs: list[PatchSpec] = []
    for sample_set in sorted(sample_sets, key=lambda s: s.sequence_name):
        seq = catalog.sequence(sample_set.sequence_name)
        bg_total = 0
        for sample in sample_set.samples:
            specs.append(PatchSpec(sample.sample_id, seq.name, sample.frame_index,
                                   TG, 0, sample.target_box))
            annotated = _annotation_box(catalog, seq.name, sample.frame_index)
            for idx, box in background_regions(sample.target_box, seq.frame_size):
                if annotated is not None and box.intersection_area(annotated) > 0:
                    continue
                specs.append(PatchSpec(sample.sample_id, seq.name, sample.frame_index,
                                       BG, idx, box))
                bg_total += 1
        if bg_total == 0:
            raise InputError(
                f"sequence {seq.name!r}: no valid background patches; "
                "its BG manifold would be undefined"
            )
    return specs


def _crop_file_name(spec: PatchSpec, taken: dict[str, BoundingBox]) -> str:
    """Spec-pattern name; repeated frames with differing regions get a suffix."""
    base = f"{spec.sequence_name}_{spec.frame_index:06d}_{spec.metaclass}_{spec.patch_index}"
    name = base + ".png"
    if name in taken and taken[name] != spec.region:
        name = f"{base}_s{spec.sample_id:06d}.png"
    return name


def build_crop_manifest(catalog: DatasetCatalog, sample_sets: list[SampleSet],
                        out_dir: Path | str) -> CropManifest:
    """Write every TG/BG crop plus manifest.json under ``out_dir``."""
    if not sample_sets or all(not s.samples for s in sample_sets):
        raise InputError("empty sample set: nothing to crop")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = plan_patches(catalog, sample_sets)

    image_cache: dict[str, np.ndarray] = {}
    taken: dict[str, BoundingBox] = {}
    entries: list[ManifestEntry] = []
    for spec in specs:
        seq = catalog.sequence(spec.sequence_name)
        frame = seq.frames[spec.frame_index]
        if frame.image_path not in image_cache:
            try:
                with Image.open(frame.image_path) as im:
                    image_cache[frame.image_path] = np.asarray(im)
            except (OSError, ValueError) as exc:
                raise InputError(f"cannot read frame image {frame.image_path}: {exc}")
        pixels = image_cache[frame.image_path]
        label = f"{spec.sequence_name}#{spec.sample_id}"
        crop = extract_crop(pixels, spec.region, label=label)
        name = _crop_file_name(spec, taken)
        if name not in taken:
            Image.fromarray(crop).save(out_dir / name, format="PNG")
            taken[name] = spec.region
        entries.append(ManifestEntry(
            spec=spec,
            crop_file=name,
            crop_size=(crop.shape[1], crop.shape[0]),
        ))

    manifest_path = out_dir / "manifest.json"
    plans = sorted({s.plan.describe() for s in sample_sets})
    doc = {
        "dataset": catalog.dataset_name,
        "created_from": {"catalog": catalog.dataset_name, "plans": plans},
        "entries": [
            {
                "id": e.spec.sample_id,
                "seq": e.spec.sequence_name,
                "frame": e.spec.frame_index,
                "metaclass": e.spec.metaclass,
                "patch": e.spec.patch_index,
                "file": e.crop_file,
                "bbox": e.spec.region.as_list(),
                "size": [e.crop_size[0], e.crop_size[1]],
            }
            for e in entries
        ],
    }
    with open(manifest_path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2, ensure_ascii=False)
        handle.write("\n")
    return CropManifest(manifest_path=manifest_path, dataset_name=catalog.dataset_name,
                        entries=entries)


def _entry_order_key(entry: dict) -> tuple:
    return (entry["seq"], entry["id"], _METACLASS_ORDER[entry["metaclass"]],
            entry["patch"])


def verify_manifest(manifest_path: Path | str, max_violations: int = 20) -> dict:
    """Check existence, decodability, size agreement, and entry ordering."""
    manifest_path = Path(manifest_path)
    try:
        with open(manifest_path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
        entries = doc["entries"]
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"unreadable manifest {manifest_path}: {exc}")

    violations: list[str] = []

    def report(msg: str) -> None:
        if len(violations) < max_violations:
            violations.append(msg)

    keys = [_entry_order_key(e) for e in entries]
    if keys != sorted(keys):
        report("entries violate (seq, id, metaclass, patch) ordering")
    for e in entries:
        path = manifest_path.parent / e["file"]
        if not path.exists():
            report(f"missing crop file {e['file']}")
            continue
        try:
            with Image.open(path) as im:
                size = im.size
        except (OSError, ValueError):
            report(f"undecodable crop file {e['file']}")
            continue
        if list(size) != list(e["size"]):
            report(f"{e['file']}: stated size {e['size']} != actual {list(size)}")
    return {
        "passed": not violations,
        "checked": len(entries),
        "violations": violations,
    }
