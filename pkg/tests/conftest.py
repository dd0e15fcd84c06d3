import zlib

import numpy as np
import pytest
from PIL import Image

from decafbench.dataset import AnnotatedSequence, BoundingBox, DatasetCatalog, Frame


def make_sequence(name: str, boxes: list, frame_size=(640, 480),
                  image_dir=None) -> AnnotatedSequence:
    """Sequence from a list of BoundingBox-or-None; optional real images."""
    frames = []
    for i, box in enumerate(boxes):
        path = str(image_dir / f"{i + 1:08d}.png") if image_dir else f"{name}/{i:08d}.jpg"
        frames.append(Frame(index=i, image_path=path, bbox=box))
    return AnnotatedSequence(name=name, frames=frames, frame_size=frame_size)


def make_catalog(sequences, dataset_name="testset") -> DatasetCatalog:
    return DatasetCatalog(dataset_name=dataset_name, source_format="VOT2015",
                          sequences=sorted(sequences, key=lambda s: s.name))


def write_noise_image(path, size=(640, 480), seed=0) -> np.ndarray:
    """Deterministic RGB noise image; returns the pixel array (H, W, 3)."""
    rng = np.random.default_rng(seed)
    pixels = rng.integers(0, 256, size=(size[1], size[0], 3), dtype=np.uint8)
    Image.fromarray(pixels).save(path, format="PNG")
    return pixels


def make_vot_tree(root, sequences: dict, frame_size=(320, 240)):
    """Write a miniature VOT-style tree: per-sequence dir with images + polygons.

    ``sequences`` maps name -> list of (x, y, w, h) or None per frame.
    """
    for name, boxes in sequences.items():
        seq_dir = root / name
        seq_dir.mkdir(parents=True)
        lines = []
        for i, box in enumerate(boxes):
            write_noise_image(seq_dir / f"{i + 1:08d}.png", size=frame_size,
                              seed=zlib.crc32(f"{name}:{i}".encode()))
            if box is None:
                lines.append("10,10,10,10,10,10,10,10")  # degenerate polygon
            else:
                x, y, w, h = box
                lines.append(f"{x},{y},{x + w},{y},{x + w},{y + h},{x},{y + h}")
        (seq_dir / "groundtruth.txt").write_text("\n".join(lines) + "\n")
    return root


@pytest.fixture
def tiny_catalog():
    """Three fully annotated sequences, no backing images."""
    sequences = [
        make_sequence("alpha", [BoundingBox(100, 100, 40, 30) for _ in range(6)]),
        make_sequence("bravo", [BoundingBox(200, 150, 50, 50) for _ in range(5)]),
        make_sequence("carol", [BoundingBox(50, 60, 30, 40) for _ in range(4)]),
    ]
    return make_catalog(sequences, dataset_name="toy3")
