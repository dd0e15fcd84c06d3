import csv
import json
import subprocess
import sys

import pytest

from decafbench.cli import main
from tests.conftest import make_vot_tree

SPEC_A = {"dimension": 16, "seed": 101, "network": "netA", "dataset": "minivot"}
SPEC_B = {"dimension": 16, "seed": 202, "network": "netB", "dataset": "minivot"}


@pytest.fixture
def vot_tree(tmp_path):
    root = tmp_path / "vot"
    root.mkdir()
    boxes = {
        "ant": [(100, 100, 40, 30)] * 6,
        "bird": [(200, 120, 30, 30)] * 5,
        "crab": [(50, 60, 30, 40)] * 5,
    }
    return make_vot_tree(root, boxes)


def _run_pipeline(tmp_path, vot_tree, noise_px=0, seed=5):
    """ingest -> sample -> synth-embed x2 -> analyze; returns the report path."""
    catalog = tmp_path / "catalog.json"
    samples = tmp_path / "samples.json"
    report = tmp_path / "report.json"
    assert main(["ingest", "--dataset-type", "vot2015", "--root", str(vot_tree),
                 "--out", str(catalog), "--name", "minivot"]) == 0
    assert main(["sample", "--catalog", str(catalog), "--plan", "random:8",
                 "--noise-px", str(noise_px), "--seed", str(seed),
                 "--out", str(samples)]) == 0
    embeddings = []
    for spec in (SPEC_A, SPEC_B):
        spec_path = tmp_path / f"spec_{spec['network']}.json"
        spec_path.write_text(json.dumps(spec))
        out = tmp_path / f"{spec['network']}.dcf"
        assert main(["synth-embed", "--samples", str(samples), "--spec",
                     str(spec_path), "--out", str(out)]) == 0
        embeddings.append(out)
    assert main(["analyze", "--catalog", str(catalog),
                 "--embeddings", str(embeddings[0]),
                 "--embeddings", str(embeddings[1]),
                 "--plan-description", "random:8",
                 "--out", str(report)]) == 0
    return catalog, samples, embeddings, report


class TestEndToEnd:
    def test_full_chain(self, tmp_path, vot_tree):
        catalog, samples, embeddings, report = _run_pipeline(tmp_path, vot_tree,
                                                             noise_px=2)
        doc = json.loads(report.read_text())
        assert doc["dataset"] == "minivot"
        assert [n["name"] for n in doc["networks"]] == ["netA", "netB"]
        counts = doc["networks"][0]["metrics"]["cosine"]["pair_counts"]
        assert counts == {"TG-TG": 3, "TG-BG": 9, "BG-BG": 3}

        svg = tmp_path / "cosine.svg"
        assert main(["render", "--report", str(report), "--metric", "cosine",
                     "--out", str(svg)]) == 0
        assert svg.read_text().startswith("<svg ")
        svg2 = tmp_path / "mahal.svg"
        assert main(["render", "--report", str(report), "--metric", "mahalanobis",
                     "--out", str(svg2)]) == 0
        assert "rgb(" in svg2.read_text()

        out_csv = tmp_path / "report.csv"
        assert main(["export-csv", "--report", str(report),
                     "--out", str(out_csv)]) == 0
        with open(out_csv, newline="") as handle:
            rows = list(csv.reader(handle))
        assert len(rows) == 1 + 2 * 6  # header + 2 networks x 2 metrics x 3 cells

        assert main(["compare", str(report), str(report)]) == 0

    def test_crops_subcommand(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        samples = tmp_path / "samples.json"
        assert main(["ingest", "--dataset-type", "vot2015", "--root", str(vot_tree),
                     "--out", str(catalog), "--name", "minivot"]) == 0
        assert main(["sample", "--catalog", str(catalog), "--plan", "first:3",
                     "--out", str(samples)]) == 0
        crops = tmp_path / "crops"
        assert main(["crops", "--catalog", str(catalog), "--samples", str(samples),
                     "--out", str(crops), "--verify"]) == 0
        manifest = json.loads((crops / "manifest.json").read_text())
        assert manifest["dataset"] == "minivot"
        # 3 sequences x 3 samples x (1 TG + 4 BG): all fixture boxes are interior
        assert len(manifest["entries"]) == 45
        assert all((crops / e["file"]).exists() for e in manifest["entries"])

    def test_pipeline_is_deterministic_across_runs(self, tmp_path, vot_tree):
        r1 = tmp_path / "r1"
        r2 = tmp_path / "r2"
        r1.mkdir(), r2.mkdir()
        *_, report1 = _run_pipeline(r1, vot_tree, noise_px=3)
        *_, report2 = _run_pipeline(r2, vot_tree, noise_px=3)
        assert report1.read_bytes() == report2.read_bytes()


class TestExitCodes:
    def test_missing_catalog_is_input_error(self, tmp_path):
        assert main(["sample", "--catalog", str(tmp_path / "nope.json"),
                     "--plan", "full", "--out", str(tmp_path / "s.json")]) == 2

    def test_empty_ingest_root_is_input_error(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["ingest", "--dataset-type", "vot2015", "--root", str(empty),
                     "--out", str(tmp_path / "c.json")]) == 2

    def test_bad_plan_string_is_input_error(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        main(["ingest", "--dataset-type", "vot2015", "--root", str(vot_tree),
              "--out", str(catalog)])
        assert main(["sample", "--catalog", str(catalog), "--plan", "stride:2",
                     "--out", str(tmp_path / "s.json")]) == 2

    def test_corrupt_embedding_is_input_error(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        main(["ingest", "--dataset-type", "vot2015", "--root", str(vot_tree),
              "--out", str(catalog), "--name", "minivot"])
        bogus = tmp_path / "bogus.dcf"
        bogus.write_bytes(b"NOPE" + b"\x00" * 60)
        assert main(["analyze", "--catalog", str(catalog), "--embeddings",
                     str(bogus), "--out", str(tmp_path / "r.json")]) == 2

    def test_single_sample_run_is_degenerate(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        samples = tmp_path / "samples.json"
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(SPEC_A))
        main(["ingest", "--dataset-type", "vot2015", "--root", str(vot_tree),
              "--out", str(catalog), "--name", "minivot"])
        main(["sample", "--catalog", str(catalog), "--plan", "first:1",
              "--out", str(samples)])
        dcf = tmp_path / "a.dcf"
        main(["synth-embed", "--samples", str(samples), "--spec", str(spec_path),
              "--out", str(dcf)])
        assert main(["analyze", "--catalog", str(catalog), "--embeddings", str(dcf),
                     "--out", str(tmp_path / "r.json")]) == 3

    def test_output_collision_is_io_error(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        main(["ingest", "--dataset-type", "vot2015", "--root", str(vot_tree),
              "--out", str(catalog)])
        blocker = tmp_path / "samples.json"
        blocker.mkdir()  # writing a file over a directory raises IsADirectoryError
        assert main(["sample", "--catalog", str(catalog), "--plan", "full",
                     "--out", str(blocker)]) == 4

    def test_compare_mismatch_exit_code(self, tmp_path, vot_tree, capsys):
        *_, report = _run_pipeline(tmp_path, vot_tree)
        doc = json.loads(report.read_text())
        doc["networks"][0]["metrics"]["cosine"]["cells"]["TG-TG"] += 0.5
        other = tmp_path / "other.json"
        other.write_text(json.dumps(doc))
        assert main(["compare", str(report), str(other)]) == 1
        out = capsys.readouterr().out
        assert "DIFF netA/cosine/TG-TG" in out

    def test_allow_missing_flag(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        samples = tmp_path / "samples.json"
        main(["ingest", "--dataset-type", "vot2015", "--root", str(vot_tree),
              "--out", str(catalog), "--name", "minivot"])
        main(["sample", "--catalog", str(catalog), "--plan", "full",
              "--out", str(samples)])
        # drop one sequence from the sample file before embedding
        doc = json.loads(samples.read_text())
        samples.write_text(json.dumps([s for s in doc if s["sequence"] != "crab"]))
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(SPEC_A))
        dcf = tmp_path / "a.dcf"
        main(["synth-embed", "--samples", str(samples), "--spec", str(spec_path),
              "--out", str(dcf)])
        report = tmp_path / "r.json"
        assert main(["analyze", "--catalog", str(catalog), "--embeddings", str(dcf),
                     "--out", str(report)]) == 2
        assert main(["analyze", "--catalog", str(catalog), "--embeddings", str(dcf),
                     "--allow-missing", "--out", str(report)]) == 0
        doc = json.loads(report.read_text())
        assert doc["networks"][0]["metrics"]["cosine"]["pair_counts"]["TG-TG"] == 1


class TestProcessInvocation:
    def test_module_entry_point_and_log_env(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        result = subprocess.run(
            [sys.executable, "-m", "decafbench.cli", "ingest", "--dataset-type",
             "vot2015", "--root", str(vot_tree), "--out", str(catalog)],
            capture_output=True, text=True, env={"DECAFBENCH_LOG": "info",
                                                 "PATH": "/usr/bin:/bin"},
        )
        assert result.returncode == 0
        assert "cataloged 3 sequences" in result.stderr
        assert result.stdout == ""
        assert catalog.exists()

    def test_quiet_by_default(self, tmp_path, vot_tree):
        catalog = tmp_path / "catalog.json"
        result = subprocess.run(
            [sys.executable, "-m", "decafbench.cli", "ingest", "--dataset-type",
             "vot2015", "--root", str(vot_tree), "--out", str(catalog)],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert result.stderr == ""
