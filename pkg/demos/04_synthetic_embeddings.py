"""
The DCF1 interchange format and the synthetic Gaussian provider
===============================================================

The analysis core never touches a neural network directly; it reads DCF1
files, a little-endian binary layout any provider can write. The bundled
synthetic provider draws each class from an isotropic Gaussian around a
seeded random centroid, which makes the whole pipeline testable against
known ground truth.
"""

import struct
import tempfile
from pathlib import Path

import numpy as np

from decafbench.dataset import BoundingBox
from decafbench.embedding import (
    METACLASS_TG,
    SyntheticSpec,
    class_centroid,
    generate_synthetic_file,
    read_embeddings,
    synthetic_embed,
    write_embeddings,
)
from decafbench.sampling import Sample, SamplePlan, SampleSet

spec = SyntheticSpec(dimension=8, seed=2024, centroid_scale=10.0,
                     within_class_sigma=1.0, network_name="demo-net",
                     dataset_name="demo")

# class centroids are unit directions scaled to centroid_scale
c = class_centroid(spec, "cup", METACLASS_TG)
print("TG centroid for 'cup':", np.round(c, 3), " norm:", round(np.linalg.norm(c), 6))

# samples scatter around the centroid with the configured sigma
draws = np.stack([synthetic_embed(spec, "cup", METACLASS_TG, frame, 0)
                  for frame in range(2000)])
print("sample mean offset from centroid:", np.abs(draws.mean(0) - c).max().round(4))
print("sample variance per dim (sigma^2 = 1):", draws.var(0, ddof=1).round(3))

# one record per (sample, patch), TG first then the BG flanks
box = BoundingBox(10, 10, 20, 20)
sets = [SampleSet(name, SamplePlan("full"),
                  [Sample(i, i, box) for i in range(3)])
        for name in ("cup", "van")]
file = generate_synthetic_file(spec, sets, bg_patches_per_sample=4)
print(f"\ngenerated {len(file.records)} records"
      f" (2 sequences x 3 samples x 5 patches), D={file.dimension}")

path = Path(tempfile.mkdtemp(prefix="decafbench-demo-")) / "demo.dcf"
write_embeddings(file, path)

# the on-disk layout: fixed header | header JSON | fixed-stride records
raw = path.read_bytes()
magic, version, _, dim, count, jlen = struct.unpack("<4sHHIQI", raw[:24])
print(f"\n{path.name}: magic={magic} version={version} D={dim} records={count}")
print("header JSON:", raw[24:24 + jlen].decode())
print("record stride:", 12 + 4 * dim, "bytes; file size:", len(raw))

back = read_embeddings(path)
print("reread losslessly:", len(back.records) == len(file.records))
