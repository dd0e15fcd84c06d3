"""Sampling plans: full-sequence, first-N sequential, random-N with box noise.

Random draws and noise offsets come from counter-addressable SplitMix64
streams keyed by (seed, sequence name), so a sample set is a pure function
of (sequence, plan) and can be regenerated bit-identically in any order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from decafbench.dataset import AnnotatedSequence, BoundingBox
from decafbench.errors import InputError
from decafbench.rng import bounded_int, fnv1a64, stream_u64

log = logging.getLogger("decafbench.sampling")

FULL = "full"
FIRST = "first"
RANDOM = "random"

# Keeps frame picks on a stream distinct from the 4-wide noise stream.
_FRAME_PICK_TAG = fnv1a64("frame-pick")

MIN_PERTURBED_SIZE = 4.0


@dataclass(frozen=True)
class SamplePlan:
    kind: str  # one of FULL, FIRST, RANDOM
    n: int | None = None
    noise_px: int = 0
    seed: int = 0
    window_start: int = 0  # first-N origin override, in annotated-frame order

    def __post_init__(self):
        if self.kind not in (FULL, FIRST, RANDOM):
            raise InputError(f"unknown plan kind {self.kind!r}")
        if self.kind in (FIRST, RANDOM):
            if self.n is None or self.n < 1:
                raise InputError(f"plan {self.kind!r} requires n >= 1, got {self.n}")
        if self.noise_px < 0:
            raise InputError("noise_px must be >= 0")

    def describe(self) -> str:
        if self.kind == FULL:
            return "full"
        if self.kind == FIRST:
            return f"first:{self.n}"
        return f"random:{self.n}+noise:{self.noise_px}"

    @staticmethod
    def parse(text: str, noise_px: int = 0, seed: int = 0) -> "SamplePlan":
        """Parse the CLI plan syntax ``full`` | ``first:N`` | ``random:N``."""
        if text == FULL:
            return SamplePlan(FULL)
        for kind in (FIRST, RANDOM):
            if text.startswith(kind + ":"):
                try:
                    n = int(text.split(":", 1)[1])
                except ValueError:
                    raise InputError(f"bad plan count in {text!r}")
                return SamplePlan(kind, n=n, noise_px=noise_px, seed=seed)
        raise InputError(f"unknown plan {text!r} (expected full | first:N | random:N)")


@dataclass(frozen=True)
class Sample:
    sample_id: int
    frame_index: int
    target_box: BoundingBox


@dataclass
class SampleSet:
    sequence_name: str
    plan: SamplePlan
    samples: list[Sample]


def derive_noise(seed: int, sequence_name: str, draw_index: int,
                 noise_px: int) -> tuple[int, int, int, int]:
    """Four integers uniform on [-noise_px, +noise_px] for one draw.

    Draw ``i`` reads outputs 4i..4i+3 of the SplitMix64 stream keyed by
    seed XOR fnv1a64(sequence_name); bit-reproducible by construction.
    """
    if noise_px == 0:
        return (0, 0, 0, 0)
    key = seed ^ fnv1a64(sequence_name)
    base = 4 * draw_index
    return tuple(
        bounded_int(stream_u64(key, base + j), -noise_px, noise_px) for j in range(4)
    )


def perturb_bbox(box: BoundingBox, noise_px: int, noise_draw: tuple[int, int, int, int],
                 frame_size: tuple[float, float]) -> BoundingBox:
    """Apply (dx, dy, dw, dh), floor w/h at 4 px, then clamp into the frame.

    Zero noise returns the box untouched, so a zero-noise random plan is
    byte-identical to sampling the raw annotations.
    """
    if noise_px == 0:
        return box
    d1, d2, d3, d4 = noise_draw
    assert all(abs(d) <= noise_px for d in noise_draw)
    out = BoundingBox(
        box.x + d1,
        box.y + d2,
        max(box.w + d3, MIN_PERTURBED_SIZE),
        max(box.h + d4, MIN_PERTURBED_SIZE),
    )
    return out.clamped(frame_size)


def plan_samples(sequence: AnnotatedSequence, plan: SamplePlan) -> SampleSet:
    """Resolve a plan against one sequence into a concrete sample set."""
    annotated = sequence.annotated_frames()
    if not annotated:
        raise InputError(f"sequence {sequence.name!r} has no annotated frames")

    samples: list[Sample] = []
    if plan.kind == FULL:
        for i, frame in enumerate(annotated):
            samples.append(Sample(i, frame.index, frame.bbox))
    elif plan.kind == FIRST:
        window = annotated[plan.window_start:plan.window_start + plan.n]
        if len(window) < plan.n:
            log.warning("sequence %s: window of %d truncated to %d annotated frames",
                        sequence.name, plan.n, len(window))
        for i, frame in enumerate(window):
            samples.append(Sample(i, frame.index, frame.bbox))
    else:  # RANDOM: with replacement, since plans often exceed sequence length
        pick_key = plan.seed ^ fnv1a64(sequence.name) ^ _FRAME_PICK_TAG
        for i in range(plan.n):
            frame = annotated[bounded_int(stream_u64(pick_key, i), 0, len(annotated) - 1)]
            noise = derive_noise(plan.seed, sequence.name, i, plan.noise_px)
            box = perturb_bbox(frame.bbox, plan.noise_px, noise, sequence.frame_size)
            samples.append(Sample(i, frame.index, box))
    return SampleSet(sequence_name=sequence.name, plan=plan, samples=samples)


def sample_set_to_dict(sample_set: SampleSet) -> dict:
    plan = sample_set.plan
    return {
        "sequence": sample_set.sequence_name,
        "plan": {
            "kind": plan.kind,
            "n": plan.n,
            "noise_px": plan.noise_px,
            "seed": plan.seed,
        },
        "samples": [
            {"id": s.sample_id, "frame": s.frame_index, "bbox": s.target_box.as_list()}
            for s in sample_set.samples
        ],
    }


def write_sample_sets(sample_sets: list[SampleSet], path: Path | str) -> None:
    """One JSON array of per-sequence sample-set objects."""
    doc = [sample_set_to_dict(s) for s in sample_sets]
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2, ensure_ascii=False)
        handle.write("\n")


def read_sample_sets(path: Path | str) -> list[SampleSet]:
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if isinstance(doc, dict):
        doc = [doc]
    out = []
    try:
        for entry in doc:
            plan = SamplePlan(
                kind=entry["plan"]["kind"],
                n=entry["plan"]["n"],
                noise_px=entry["plan"]["noise_px"],
                seed=entry["plan"]["seed"],
            )
            samples = [
                Sample(s["id"], s["frame"], BoundingBox(*s["bbox"]))
                for s in entry["samples"]
            ]
            out.append(SampleSet(entry["sequence"], plan, samples))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed sample-set file ({exc})") from exc
    return out
