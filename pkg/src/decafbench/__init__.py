"""Discriminability analytics for deep-activation feature (DeCAF) spaces.

The package estimates per-class embedding manifolds (mean + diagonal
variance) from annotated video sequences and reports pooled
cosine-similarity and Mahalanobis-distance metaclass matrices per
feature extractor.
"""

from decafbench.dataset import (
    AnnotatedSequence,
    BoundingBox,
    DatasetCatalog,
    load_dataset,
    parse_uav123_sequence,
    parse_vot_sequence,
)
from decafbench.embedding import (
    EmbeddingFile,
    EmbeddingRecord,
    SyntheticSpec,
    generate_synthetic_file,
    read_embeddings,
    synthetic_embed,
    write_embeddings,
)
from decafbench.manifold import ManifoldStats
from decafbench.metrics import (
    MetaclassMatrix,
    MetricConfig,
    cosine_similarity,
    mahalanobis_sq,
    pool_metaclass_matrix,
)
from decafbench.pipeline import AnalysisReport, analyze, run_experiment_suite
from decafbench.sampling import SamplePlan, SampleSet, plan_samples

__all__ = [
    "AnnotatedSequence",
    "AnalysisReport",
    "BoundingBox",
    "DatasetCatalog",
    "EmbeddingFile",
    "EmbeddingRecord",
    "ManifoldStats",
    "MetaclassMatrix",
    "MetricConfig",
    "SamplePlan",
    "SampleSet",
    "SyntheticSpec",
    "analyze",
    "cosine_similarity",
    "generate_synthetic_file",
    "load_dataset",
    "mahalanobis_sq",
    "parse_uav123_sequence",
    "parse_vot_sequence",
    "plan_samples",
    "pool_metaclass_matrix",
    "read_embeddings",
    "run_experiment_suite",
    "synthetic_embed",
    "write_embeddings",
]

__version__ = "0.1.0"
