"""Regenerate the committed golden fixtures under tests/data and tests/golden.

Run from the repository root after any intentional change to the pipeline's
byte-level outputs, then review the diff before committing:

    python3 scripts/make_goldens.py
"""

import json
import sys
from pathlib import Path

from decafbench.cli import main
from decafbench.dataset import (
    AnnotatedSequence,
    BoundingBox,
    DatasetCatalog,
    Frame,
    write_catalog,
)

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"
GOLDEN = ROOT / "tests" / "golden"

SPECS = {
    "netA": {"dimension": 24, "seed": 31101, "network": "netA", "dataset": "toy3",
             "centroid_scale": 10.0, "within_class_sigma": 1.0},
    "netB": {"dimension": 24, "seed": 95813, "network": "netB", "dataset": "toy3",
             "centroid_scale": 10.0, "within_class_sigma": 1.0},
}


def _sequence(name: str, box: BoundingBox, count: int) -> AnnotatedSequence:
    frames = [Frame(index=i, image_path=f"{name}/{i + 1:08d}.jpg", bbox=box)
              for i in range(count)]
    return AnnotatedSequence(name=name, frames=frames, frame_size=(640, 480))


def build_fixture_catalog() -> DatasetCatalog:
    sequences = [
        _sequence("alpha", BoundingBox(100, 100, 40, 30), 6),
        _sequence("bravo", BoundingBox(200, 150, 50, 50), 5),
        _sequence("carol", BoundingBox(50, 60, 30, 40), 4),
    ]
    return DatasetCatalog(dataset_name="toy3", source_format="VOT2015",
                          sequences=sequences)


def run(out_dir: Path, data_dir: Path) -> None:
    """The golden pipeline: sample -> synth-embed x2 -> analyze -> render."""
    out_dir.mkdir(parents=True, exist_ok=True)
    catalog = data_dir / "catalog.json"
    samples = out_dir / "samples.json"
    report = out_dir / "report.json"
    steps = [
        ["sample", "--catalog", str(catalog), "--plan", "random:6",
         "--seed", "13", "--out", str(samples)],
        ["synth-embed", "--samples", str(samples),
         "--spec", str(data_dir / "synth_netA.json"),
         "--out", str(out_dir / "netA.dcf")],
        ["synth-embed", "--samples", str(samples),
         "--spec", str(data_dir / "synth_netB.json"),
         "--out", str(out_dir / "netB.dcf")],
        ["analyze", "--catalog", str(catalog),
         "--embeddings", str(out_dir / "netA.dcf"),
         "--embeddings", str(out_dir / "netB.dcf"),
         "--plan-description", "random:6", "--out", str(report)],
        ["render", "--report", str(report), "--metric", "cosine",
         "--out", str(out_dir / "cosine.svg")],
        ["render", "--report", str(report), "--metric", "mahalanobis",
         "--out", str(out_dir / "mahalanobis.svg")],
    ]
    for step in steps:
        code = main(step)
        if code != 0:
            raise SystemExit(f"golden step {step[0]} exited {code}")


def main_script() -> int:
    DATA.mkdir(parents=True, exist_ok=True)
    write_catalog(build_fixture_catalog(), DATA / "catalog.json")
    for name, spec in SPECS.items():
        with open(DATA / f"synth_{name}.json", "w", encoding="utf-8") as handle:
            json.dump(spec, handle, indent=2, sort_keys=True)
            handle.write("\n")
    run(GOLDEN, DATA)
    print(f"goldens written under {GOLDEN}")
    return 0


if __name__ == "__main__":
    sys.exit(main_script())
