"""Command-line surface for the full pipeline.

Subcommands: ingest, sample, crops, synth-embed, analyze, render,
export-csv, compare. Diagnostics go to standard error (level from the
DECAFBENCH_LOG environment variable); data outputs go to named files only.

Exit codes: 0 success, 1 comparison mismatch, 2 input validation,
3 degenerate manifold, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from decafbench import dataset as ds
from decafbench import report as rp
from decafbench.embedding import generate_synthetic_file, load_synthetic_spec, \
    write_embeddings
from decafbench.errors import DegenerateManifoldError, InputError
from decafbench.metrics import MetricConfig
from decafbench.patches import build_crop_manifest, verify_manifest
from decafbench.pipeline import RunConfig, analyze
from decafbench.sampling import SamplePlan, plan_samples, read_sample_sets, \
    write_sample_sets

log = logging.getLogger("decafbench.cli")

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("DECAFBENCH_LOG", "warn").lower(),
                            logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decafbench",
        description="Discriminability analytics for deep-activation feature spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a benchmark tree into a catalog")
    p.add_argument("--dataset-type", required=True, choices=["vot2015", "uav123"])
    p.add_argument("--root", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--name", default=None, help="override the catalog dataset name")

    p = sub.add_parser("sample", help="resolve a sampling plan against a catalog")
    p.add_argument("--catalog", required=True, type=Path)
    p.add_argument("--plan", required=True, help="full | first:N | random:N")
    p.add_argument("--noise-px", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-start", type=int, default=0,
                   help="origin of the first-N window, in annotated-frame order")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("crops", help="materialize TG/BG crops plus manifest.json")
    p.add_argument("--catalog", required=True, type=Path)
    p.add_argument("--samples", required=True, action="append", type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--verify", action="store_true",
                   help="re-verify the manifest after writing")

    p = sub.add_parser("synth-embed", help="deterministic synthetic embedding files")
    p.add_argument("--samples", required=True, action="append", type=Path)
    p.add_argument("--spec", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--bg-patches", type=int, default=4)

    p = sub.add_parser("analyze", help="pool metaclass matrices per network")
    p.add_argument("--catalog", required=True, type=Path)
    p.add_argument("--embeddings", required=True, action="append", type=Path)
    p.add_argument("--pooling", choices=["all-pairs", "same-sequence"],
                   default="all-pairs")
    p.add_argument("--variance", choices=["sample", "population"], default="sample")
    p.add_argument("--epsilon", type=float, default=1e-12)
    p.add_argument("--allow-missing", action="store_true")
    p.add_argument("--plan-description", default="full")
    p.add_argument("--with-pairs", action="store_true",
                   help="include per-pair values in the report")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("render", help="render the 2x3 metaclass-matrix figure")
    p.add_argument("--report", required=True, type=Path)
    p.add_argument("--metric", required=True, choices=["cosine", "mahalanobis"])
    p.add_argument("--invert", action="store_true",
                   help="flip the grayscale mapping (light = similar)")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("export-csv", help="flatten a report to CSV rows")
    p.add_argument("--report", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("compare", help="diff two reports cell by cell")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)
    p.add_argument("--tolerance", type=float, default=1e-9)

    return parser


def _cmd_ingest(args) -> int:
    fmt = ds.VOT2015 if args.dataset_type == "vot2015" else ds.UAV123
    catalog = ds.load_dataset(args.root, fmt, strict=args.strict,
                              dataset_name=args.name)
    ds.write_catalog(catalog, args.out)
    log.info("cataloged %d sequences (%d classes), %d skipped",
             len(catalog.sequences), catalog.class_count, len(catalog.skipped))
    return EXIT_OK


def _cmd_sample(args) -> int:
    catalog = ds.read_catalog(args.catalog)
    plan = SamplePlan.parse(args.plan, noise_px=args.noise_px, seed=args.seed)
    if args.window_start:
        plan = SamplePlan(plan.kind, n=plan.n, noise_px=plan.noise_px,
                          seed=plan.seed, window_start=args.window_start)
    sample_sets = [plan_samples(seq, plan) for seq in catalog.sequences]
    write_sample_sets(sample_sets, args.out)
    log.info("planned %d samples over %d sequences",
             sum(len(s.samples) for s in sample_sets), len(sample_sets))
    return EXIT_OK


def _read_many_sample_sets(paths) -> list:
    sample_sets = []
    for path in paths:
        sample_sets.extend(read_sample_sets(path))
    return sample_sets


def _cmd_crops(args) -> int:
    catalog = ds.read_catalog(args.catalog)
    sample_sets = _read_many_sample_sets(args.samples)
    manifest = build_crop_manifest(catalog, sample_sets, args.out)
    log.info("wrote %d manifest entries under %s", len(manifest.entries), args.out)
    if args.verify:
        result = verify_manifest(manifest.manifest_path)
        if not result["passed"]:
            for violation in result["violations"]:
                log.error("manifest violation: %s", violation)
            return EXIT_INPUT
    return EXIT_OK


def _cmd_synth_embed(args) -> int:
    sample_sets = _read_many_sample_sets(args.samples)
    spec = load_synthetic_spec(args.spec)
    file = generate_synthetic_file(spec, sample_sets,
                                   bg_patches_per_sample=args.bg_patches)
    write_embeddings(file, args.out)
    log.info("wrote %d records (D=%d) to %s", len(file.records), file.dimension,
             args.out)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    catalog = ds.read_catalog(args.catalog)
    config = RunConfig(
        catalog=catalog,
        embedding_paths=list(args.embeddings),
        metric_config=MetricConfig(epsilon=args.epsilon, pooling_mode=args.pooling,
                                   variance_mode=args.variance),
        allow_missing=args.allow_missing,
        plan_description=args.plan_description,
        collect_pairs=args.with_pairs,
    )
    report = analyze(config)
    rp.emit_report_json(report, args.out)
    log.info("analyzed %d networks over %d sequences", len(report.networks),
             len(catalog.sequences))
    return EXIT_OK


def _cmd_render(args) -> int:
    doc = rp.read_report(args.report)
    rp.render_heatmap_grid(doc, args.metric, args.out, invert=args.invert)
    return EXIT_OK


def _cmd_export_csv(args) -> int:
    doc = rp.read_report(args.report)
    rp.emit_csv_from_dict(doc, args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    result = rp.compare_reports(args.a, args.b, args.tolerance)
    if result["passed"]:
        print(f"PASS max_rel_diff={result['max_rel_diff']:.3e}")
        return EXIT_OK
    for err in result["structural_errors"]:
        print(f"STRUCTURAL {err}")
    for diff in result["diffs"]:
        print(f"DIFF {diff['network']}/{diff['metric']}/{diff['cell']}: "
              f"{diff['a']!r} vs {diff['b']!r} (rel {diff['rel_diff']:.3e})")
    return EXIT_MISMATCH


_HANDLERS = {
    "ingest": _cmd_ingest,
    "sample": _cmd_sample,
    "crops": _cmd_crops,
    "synth-embed": _cmd_synth_embed,
    "analyze": _cmd_analyze,
    "render": _cmd_render,
    "export-csv": _cmd_export_csv,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except DegenerateManifoldError as exc:
        log.error("%s", exc)
        return EXIT_DEGENERATE
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        log.error("missing input: %s", exc)
        return EXIT_INPUT
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
