"""
Frame sampling plans: full, first-N, random-N with box noise
============================================================

Sampling is a pure function of (sequence, plan). The random plan draws
frames with replacement from a counter-addressable stream, so reruns and
parallel runs agree bit for bit, and the noise protocol perturbs the
annotation box without ever shrinking it below 4 px or leaving the frame.
"""

from collections import Counter

from decafbench.dataset import AnnotatedSequence, BoundingBox, Frame
from decafbench.sampling import SamplePlan, derive_noise, plan_samples

frames = [Frame(index=i, image_path=f"seq/{i:08d}.jpg",
                bbox=BoundingBox(100 + i, 80, 40, 30)) for i in range(50)]
seq = AnnotatedSequence(name="seq", frames=frames, frame_size=(640, 480))

# full takes every annotated frame; first:N takes the prefix
print("full     ->", len(plan_samples(seq, SamplePlan("full")).samples), "samples")
print("first:8  ->", [s.frame_index
                      for s in plan_samples(seq, SamplePlan("first", n=8)).samples])

# random:N draws with replacement; same seed, same picks
plan = SamplePlan("random", n=10, noise_px=2, seed=42)
picks = [s.frame_index for s in plan_samples(seq, plan).samples]
again = [s.frame_index for s in plan_samples(seq, plan).samples]
print("random:10 picks", picks, "(rerun identical:", picks == again, ")")

# the noised boxes stay inside the frame and keep their rough size
for sample in plan_samples(seq, plan).samples[:4]:
    print(f"  frame {sample.frame_index}: box {sample.target_box.as_list()}")

# the noise stream itself is uniform on [-k, k] per component
counts = Counter()
for i in range(20000):
    dx, dy, dw, dh = derive_noise(42, "seq", i, 3)
    counts[dx] += 1
print("\ndx frequencies over 20000 draws (expect ~1/7 = 0.143 each):")
for value in sorted(counts):
    print(f"  {value:+d}: {counts[value] / 20000:.3f}")
