"""
Target and background patches, and the crop manifest
====================================================

Every sample yields one TG crop (the target box) and up to four BG crops:
same-size flanks one box-width/height away, dropped when they leave the
frame or touch the annotated target. Crops land on disk as PNGs next to a
manifest.json that embedding providers consume in a fixed order.
"""

import json
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from decafbench.dataset import AnnotatedSequence, BoundingBox, DatasetCatalog, Frame
from decafbench.patches import background_regions, build_crop_manifest, verify_manifest
from decafbench.sampling import SamplePlan, plan_samples

# background flank geometry, no pixels involved
target = BoundingBox(300, 200, 40, 30)
print("target", target.as_list(), "in a 640x480 frame has flanks:")
for idx, box in background_regions(target, (640, 480)):
    side = ["left", "right", "up", "down"][idx]
    print(f"  {side:5s} -> {box.as_list()}")

# an edge-hugging target loses the flank that would leave the frame
edge = BoundingBox(0, 200, 40, 30)
kept = [idx for idx, _ in background_regions(edge, (640, 480))]
print("edge target keeps flank indices", kept)

# now with pixels: one 6-frame sequence over noise images
root = Path(tempfile.mkdtemp(prefix="decafbench-demo-"))
rng = np.random.default_rng(7)
frames = []
for i in range(6):
    path = root / f"{i + 1:08d}.png"
    Image.fromarray(rng.integers(0, 256, (240, 320, 3), dtype=np.uint8)).save(path)
    frames.append(Frame(index=i, image_path=str(path),
                        bbox=BoundingBox(120, 90, 30, 30)))
seq = AnnotatedSequence(name="cup", frames=frames, frame_size=(320, 240))
catalog = DatasetCatalog(dataset_name="demo", source_format="VOT2015",
                         sequences=[seq])

sample_sets = [plan_samples(seq, SamplePlan("full"))]
manifest = build_crop_manifest(catalog, sample_sets, root / "crops")
print(f"\nwrote {len(manifest.entries)} crops"
      f" ({sum(e.spec.metaclass == 'TG' for e in manifest.entries)} TG,"
      f" {sum(e.spec.metaclass == 'BG' for e in manifest.entries)} BG)")

entry = json.loads(manifest.manifest_path.read_text())["entries"][0]
print("first manifest entry:", entry)

result = verify_manifest(manifest.manifest_path)
print("verify_manifest:", "pass" if result["passed"] else result["violations"])
