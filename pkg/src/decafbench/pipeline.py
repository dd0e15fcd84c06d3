"""End-to-end orchestration: embedding files -> manifolds -> pooled report.

The analysis is a single streaming pass per embedding file; memory is
bounded by (sequences x 2 metaclasses) accumulators, never by record
count. Sequence alignment between catalog and embedding files is by name.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

from decafbench.dataset import DatasetCatalog
from decafbench.embedding import (
    METACLASS_NAMES,
    EmbeddingFile,
    SyntheticSpec,
    generate_synthetic_file,
    iter_embeddings,
    write_embeddings,
)
from decafbench.errors import InputError
from decafbench.manifold import FinalizedManifold, ManifoldStats
from decafbench.metrics import (
    COSINE,
    MAHALANOBIS_SQ,
    MetricConfig,
    pool_metaclass_matrix,
)
from decafbench.report import AnalysisReport, NetworkResult, emit_report_json
from decafbench.rng import fnv1a64
from decafbench.sampling import SamplePlan, SampleSet, plan_samples

log = logging.getLogger("decafbench.pipeline")


@dataclass
class RunConfig:
    catalog: DatasetCatalog
    embedding_paths: list[Path]
    metric_config: MetricConfig = field(default_factory=MetricConfig)
    allow_missing: bool = False
    plan_description: str = "full"
    seeds: dict = field(default_factory=dict)
    collect_pairs: bool = False


def _stream_network(path: Path, catalog: DatasetCatalog,
                    config: RunConfig) -> tuple[str, list[FinalizedManifold]]:
    """One pass over a DCF1 file into finalized per-class manifolds."""
    header, records = iter_embeddings(path)
    if header.dataset_name != catalog.dataset_name:
        raise InputError(
            f"{path}: embedding dataset {header.dataset_name!r} does not match "
            f"catalog {catalog.dataset_name!r}")
    catalog_names = {seq.name for seq in catalog.sequences}
    for name in header.sequence_table:
        if name not in catalog_names:
            raise InputError(f"{path}: sequence {name!r} not in catalog")

    stats: dict[tuple[str, str], ManifoldStats] = {}
    for rec in records:
        key = (header.sequence_table[rec.sequence_index],
               METACLASS_NAMES[rec.metaclass])
        if key not in stats:
            stats[key] = ManifoldStats(key, header.dimension)
        stats[key].update(rec.vector)

    missing = sorted(
        name for name in catalog_names
        if (name, "TG") not in stats or (name, "BG") not in stats
    )
    if missing:
        if not config.allow_missing:
            raise InputError(
                f"{path}: catalog sequences missing from embeddings: {missing}")
        log.warning("%s: skipping sequences without embeddings: %s", path, missing)
    kept = sorted(catalog_names - set(missing))
    finalized = [
        stats[(name, metaclass)].finalize(config.metric_config.variance_mode)
        for name in kept for metaclass in ("TG", "BG")
    ]
    return header.network_name, finalized


def analyze(config: RunConfig) -> AnalysisReport:
    """Pooled cosine + Mahalanobis metaclass matrices for every network."""
    if not config.embedding_paths:
        raise InputError("no embedding files to analyze")
    networks: list[NetworkResult] = []
    seen: set[str] = set()
    for path in config.embedding_paths:
        name, finalized = _stream_network(Path(path), config.catalog, config)
        if name in seen:
            raise InputError(f"duplicate network name {name!r} across embedding files")
        seen.add(name)
        networks.append(NetworkResult(
            network_name=name,
            cosine=pool_metaclass_matrix(finalized, COSINE, config.metric_config,
                                         network_name=name,
                                         collect_pairs=config.collect_pairs),
            mahalanobis_sq=pool_metaclass_matrix(finalized, MAHALANOBIS_SQ,
                                                 config.metric_config,
                                                 network_name=name,
                                                 collect_pairs=config.collect_pairs),
        ))
    return AnalysisReport(
        dataset_name=config.catalog.dataset_name,
        plan_description=config.plan_description,
        networks=networks,
        config=config.metric_config,
        seeds=dict(config.seeds),
    )


EmbeddingProvider = Callable[[SamplePlan, list[SampleSet]], list[EmbeddingFile]]


def synthetic_provider(base_spec: SyntheticSpec, network_names: Iterable[str],
                       bg_patches_per_sample: int = 4) -> EmbeddingProvider:
    """Provider that fakes one embedding file per network, seeds split by name."""
    names = list(network_names)

    def provide(plan: SamplePlan, sample_sets: list[SampleSet]) -> list[EmbeddingFile]:
        files = []
        for name in names:
            spec = replace(base_spec, seed=base_spec.seed ^ fnv1a64(name),
                           network_name=name)
            files.append(generate_synthetic_file(spec, sample_sets,
                                                 bg_patches_per_sample))
        return files

    return provide


def _case_name(dataset: str, plan: SamplePlan) -> str:
    return f"{dataset}_{plan.describe()}".replace(":", "-").replace("+", "_")


def run_experiment_suite(catalog: DatasetCatalog, plans: list[SamplePlan],
                         provider: EmbeddingProvider, out_dir: Path | str,
                         metric_config: MetricConfig = MetricConfig(),
                         seeds: dict | None = None) -> dict[str, AnalysisReport]:
    """One report per (dataset, plan); file names encode the case."""
    if not plans:
        raise InputError("empty plan list")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports: dict[str, AnalysisReport] = {}
    for plan in plans:
        sample_sets = [plan_samples(seq, plan) for seq in catalog.sequences]
        case = _case_name(catalog.dataset_name, plan)
        paths = []
        for file in provider(plan, sample_sets):
            path = out_dir / f"{case}_{file.network_name}.dcf"
            write_embeddings(file, path)
            paths.append(path)
        config = RunConfig(
            catalog=catalog,
            embedding_paths=paths,
            metric_config=metric_config,
            plan_description=plan.describe(),
            seeds=dict(seeds or {}, plan_seed=plan.seed),
        )
        report = analyze(config)
        emit_report_json(report, out_dir / f"report_{case}.json")
        reports[case] = report
    return reports
