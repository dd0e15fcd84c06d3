"""
Parsing tracking-benchmark annotations into a catalog
=====================================================

Builds a throwaway VOT-style tree (per-sequence directories holding a
groundtruth.txt of 8-value polygons), parses it, and walks the resulting
catalog. The same entry point handles UAV123-style x,y,w,h layouts.
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from decafbench.dataset import VOT2015, load_dataset, polygon_to_bbox

root = Path(tempfile.mkdtemp(prefix="decafbench-demo-"))

# two tiny sequences; frame images are flat noise, annotations a fixed box
rng = np.random.default_rng(0)
for name, (x, y, w, h) in [("cup", (40, 30, 40, 30)), ("van", (90, 60, 50, 40))]:
    seq_dir = root / name
    seq_dir.mkdir()
    lines = []
    for i in range(5):
        pixels = rng.integers(0, 256, size=(240, 320, 3), dtype=np.uint8)
        Image.fromarray(pixels).save(seq_dir / f"{i + 1:08d}.png")
        lines.append(f"{x},{y},{x + w},{y},{x + w},{y + h},{x},{y + h}")
    (seq_dir / "groundtruth.txt").write_text("\n".join(lines) + "\n")

catalog = load_dataset(root, VOT2015)
print(f"dataset {catalog.dataset_name!r}: {len(catalog.sequences)} sequences,"
      f" {catalog.class_count} classes (TG + BG per sequence)")
for seq in catalog.sequences:
    annotated = sum(1 for f in seq.frames if f.bbox is not None)
    print(f"  {seq.name}: {annotated}/{len(seq.frames)} annotated,"
          f" frame {seq.frame_size[0]}x{seq.frame_size[1]}")

# rotated polygons reduce to their tightest axis-aligned container
tilted = [50.0, 10.0, 90.0, 50.0, 50.0, 90.0, 10.0, 50.0]
print("\npolygon", tilted)
print("reduces to", polygon_to_bbox(tilted).as_list())
