"""Benchmark ingestion: VOT2015 / UAV123 annotations into a uniform catalog.

Both benchmark formats reduce to the same sequence model: an ordered list
of frames, each carrying an optional axis-aligned target box. A sequence
contributes two novel classes downstream (its target and its background),
so a catalog of S sequences always describes 2*S classes.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from decafbench.errors import InputError, ParseError

log = logging.getLogger("decafbench.dataset")

_IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")

VOT2015 = "VOT2015"
UAV123 = "UAV123"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in continuous pixel coordinates, w/h > 0 once accepted."""

    x: float
    y: float
    w: float
    h: float

    def clamped(self, frame_size: tuple[float, float]) -> "BoundingBox":
        """Clamp into [0, W] x [0, H], shrinking the box if it cannot fit."""
        fw, fh = frame_size
        w = min(self.w, fw)
        h = min(self.h, fh)
        x = min(max(self.x, 0.0), fw - w)
        y = min(max(self.y, 0.0), fh - h)
        return BoundingBox(x, y, w, h)

    def intersection_area(self, other: "BoundingBox") -> float:
        dx = min(self.x + self.w, other.x + other.w) - max(self.x, other.x)
        dy = min(self.y + self.h, other.y + other.h) - max(self.y, other.y)
        return max(dx, 0.0) * max(dy, 0.0)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class Frame:
    index: int
    image_path: str
    bbox: BoundingBox | None


@dataclass
class AnnotatedSequence:
    name: str
    frames: list[Frame]
    frame_size: tuple[int, int]

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def annotated_frames(self) -> list[Frame]:
        return [f for f in self.frames if f.bbox is not None]


@dataclass
class DatasetCatalog:
    dataset_name: str
    source_format: str
    sequences: list[AnnotatedSequence]
    skipped: list[dict] = field(default_factory=list)

    @property
    def class_count(self) -> int:
        """Each sequence contributes one target and one background class."""
        return 2 * len(self.sequences)

    def sequence(self, name: str) -> AnnotatedSequence:
        for seq in self.sequences:
            if seq.name == name:
                return seq
        raise InputError(f"sequence {name!r} not in catalog {self.dataset_name!r}")


def polygon_to_bbox(values: list[float]) -> BoundingBox | None:
    """Tightest axis-aligned container of a 4-corner polygon.

    Returns None for zero-area (degenerate) polygons; the frame stays in
    the sequence but is excluded from sampling.
    """
    xs = values[0::2]
    ys = values[1::2]
    w = max(xs) - min(xs)
    h = max(ys) - min(ys)
    if w <= 0 or h <= 0:
        return None
    return BoundingBox(min(xs), min(ys), w, h)


def _parse_line_floats(line: str, path: Path, lineno: int, expected: int) -> list[float]:
    parts = [p for p in line.replace("\t", ",").replace(" ", ",").split(",") if p]
    if len(parts) != expected:
        raise ParseError(
            f"{path}:{lineno}: expected {expected} comma-separated values, got {len(parts)}"
        )
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"{path}:{lineno}: non-numeric field ({exc})") from exc


def _list_frame_images(frames_dir: Path) -> list[Path]:
    return sorted(
        p for p in frames_dir.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )


def _probe_frame_size(images: list[Path], boxes: list[BoundingBox | None],
                      where: str, strict: bool) -> tuple[int, int]:
    """Frame extent from the first decodable image, else the annotation envelope."""
    for path in images:
        if path.exists():
            try:
                from PIL import Image

                with Image.open(path) as im:
                    return im.size
            except Exception as exc:  # undecodable header
                if strict:
                    raise InputError(f"{where}: cannot read image {path}: {exc}")
                log.warning("%s: cannot read image %s: %s", where, path, exc)
    if strict:
        raise InputError(f"{where}: no decodable frame image found")
    # Image-free ingestion (annotation-only analytics): use the smallest
    # frame that contains every annotated box.
    max_x = max((b.x + b.w for b in boxes if b is not None), default=0.0)
    max_y = max((b.y + b.h for b in boxes if b is not None), default=0.0)
    log.warning("%s: no images readable; frame size from annotation envelope", where)
    return (int(math.ceil(max_x)), int(math.ceil(max_y)))


def _build_sequence(name: str, gt_path: Path, images: list[Path],
                    boxes: list[BoundingBox | None], strict: bool) -> AnnotatedSequence:
    if len(boxes) != len(images):
        msg = (f"{gt_path}: {len(boxes)} annotation lines vs {len(images)} frame images")
        if strict:
            raise ParseError(msg)
        log.warning("%s; truncating to the shorter length", msg)
        n = min(len(boxes), len(images))
        if len(images) == 0:
            # No frame images shipped at all: synthesize stable frame names.
            images = [gt_path.parent / f"{i + 1:08d}.jpg" for i in range(len(boxes))]
            n = len(boxes)
        boxes, images = boxes[:n], images[:n]
    if strict:
        for path in images:
            if not path.exists():
                raise InputError(f"{name}: missing frame image {path}")
    frames = [
        Frame(index=i, image_path=str(img), bbox=box)
        for i, (img, box) in enumerate(zip(images, boxes))
    ]
    if not any(f.bbox is not None for f in frames):
        raise ParseError(f"{gt_path}: sequence {name!r} has no annotated frames")
    size = _probe_frame_size(images, boxes, name, strict)
    return AnnotatedSequence(name=name, frames=frames, frame_size=size)


def parse_vot_sequence(sequence_dir: Path | str, strict: bool = False) -> AnnotatedSequence:
    """Parse one VOT-style sequence directory.

    Expects ``groundtruth.txt`` with one 8-value polygon line per frame
    (x1,y1,...,x4,y4) next to the ordered frame images. Each polygon is
    reduced to its tightest axis-aligned box; degenerate polygons mark
    the frame unannotated.
    """
    sequence_dir = Path(sequence_dir)
    gt_path = sequence_dir / "groundtruth.txt"
    if not gt_path.exists():
        raise ParseError(f"{sequence_dir}: no groundtruth.txt")
    boxes: list[BoundingBox | None] = []
    with open(gt_path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            values = _parse_line_floats(line, gt_path, lineno, expected=8)
            if not all(math.isfinite(v) for v in values):
                raise ParseError(f"{gt_path}:{lineno}: non-finite polygon coordinate")
            box = polygon_to_bbox(values)
            if box is None:
                log.warning("%s:%d: zero-area polygon, frame unannotated", gt_path, lineno)
            boxes.append(box)
    images = _list_frame_images(sequence_dir)
    return _build_sequence(sequence_dir.name, gt_path, images, boxes, strict)


def parse_uav123_sequence(annotation_file: Path | str, frames_dir: Path | str,
                          name: str, strict: bool = False) -> AnnotatedSequence:
    """Parse one UAV123 sequence: ``x,y,w,h`` per line, NaN = target absent."""
    annotation_file = Path(annotation_file)
    frames_dir = Path(frames_dir)
    if not annotation_file.exists():
        raise ParseError(f"{annotation_file}: annotation file not found")
    boxes: list[BoundingBox | None] = []
    with open(annotation_file, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            values = _parse_line_floats(line, annotation_file, lineno, expected=4)
            if any(math.isnan(v) for v in values):
                boxes.append(None)
                continue
            x, y, w, h = values
            if not all(math.isfinite(v) for v in values):
                raise ParseError(f"{annotation_file}:{lineno}: non-finite box field")
            if w <= 0 or h <= 0:
                log.warning("%s:%d: zero-area box, frame unannotated",
                            annotation_file, lineno)
                boxes.append(None)
                continue
            boxes.append(BoundingBox(x, y, w, h))
    images = _list_frame_images(frames_dir) if frames_dir.is_dir() else []
    return _build_sequence(name, annotation_file, images, boxes, strict)


def _uav_anno_dir(root: Path) -> Path:
    for candidate in (root / "anno" / "UAV123", root / "anno", root):
        if candidate.is_dir() and any(candidate.glob("*.txt")):
            return candidate
    raise InputError(f"{root}: no UAV123 annotation directory found")


def _uav_frames_dir(root: Path, name: str) -> Path:
    for candidate in (root / "data_seq" / "UAV123" / name, root / "data_seq" / name,
                      root / name):
        if candidate.is_dir():
            return candidate
    return root / name  # resolved lazily; lenient parse tolerates absence


def load_dataset(root: Path | str, source_format: str, strict: bool = False,
                 dataset_name: str | None = None) -> DatasetCatalog:
    """Catalog every parseable sequence under ``root``, sorted by name.

    Lenient mode records per-sequence failures in the catalog's skip list;
    strict mode raises on the first failure. Zero parseable sequences is
    always fatal.
    """
    root = Path(root)
    if not root.is_dir():
        raise InputError(f"dataset root {root} does not exist")
    if source_format not in (VOT2015, UAV123):
        raise InputError(f"unknown dataset format {source_format!r}")

    jobs: list[tuple[str, object]] = []
    if source_format == VOT2015:
        for seq_dir in sorted(p for p in root.iterdir() if p.is_dir()):
            if (seq_dir / "groundtruth.txt").exists():
                jobs.append((seq_dir.name, seq_dir))
    else:
        anno_dir = _uav_anno_dir(root)
        for anno in sorted(anno_dir.glob("*.txt")):
            jobs.append((anno.stem, anno))

    sequences: list[AnnotatedSequence] = []
    skipped: list[dict] = []
    for name, source in jobs:
        try:
            if source_format == VOT2015:
                seq = parse_vot_sequence(source, strict=strict)
            else:
                seq = parse_uav123_sequence(source, _uav_frames_dir(root, name),
                                            name, strict=strict)
            sequences.append(seq)
        except (ParseError, InputError) as exc:
            if strict:
                raise
            log.warning("skipping sequence %s: %s", name, exc)
            skipped.append({"name": name, "reason": str(exc)})

    if not sequences:
        raise InputError(f"no sequences found under {root}")
    names = [s.name for s in sequences]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate sequence names in {root}")
    sequences.sort(key=lambda s: s.name)
    return DatasetCatalog(
        dataset_name=dataset_name or root.name,
        source_format=source_format,
        sequences=sequences,
        skipped=skipped,
    )


def catalog_to_dict(catalog: DatasetCatalog) -> dict:
    return {
        "dataset_name": catalog.dataset_name,
        "source_format": catalog.source_format,
        "sequences": [
            {
                "name": seq.name,
                "frame_count": seq.frame_count,
                "frame_size": [seq.frame_size[0], seq.frame_size[1]],
                "frames": [
                    {
                        "i": f.index,
                        "image": f.image_path,
                        "bbox": f.bbox.as_list() if f.bbox is not None else None,
                    }
                    for f in seq.frames
                ],
            }
            for seq in catalog.sequences
        ],
    }


def write_catalog(catalog: DatasetCatalog, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(catalog_to_dict(catalog), handle, indent=2, ensure_ascii=False)
        handle.write("\n")


def read_catalog(path: Path | str) -> DatasetCatalog:
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    try:
        sequences = []
        for seq in doc["sequences"]:
            frames = [
                Frame(
                    index=f["i"],
                    image_path=f["image"],
                    bbox=BoundingBox(*f["bbox"]) if f["bbox"] is not None else None,
                )
                for f in seq["frames"]
            ]
            sequences.append(
                AnnotatedSequence(
                    name=seq["name"],
                    frames=frames,
                    frame_size=(seq["frame_size"][0], seq["frame_size"][1]),
                )
            )
        return DatasetCatalog(
            dataset_name=doc["dataset_name"],
            source_format=doc["source_format"],
            sequences=sequences,
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed catalog file ({exc})") from exc
