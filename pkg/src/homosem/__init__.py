"""Evaluation harness for homonymy and synonymy in word embeddings.

The package turns sense-annotated homonym datasets into controlled triples
(two same-sense words plus one outlier), resolves the words to vectors via
static or contextualized providers, and scores whether same-sense words are
strictly closer under cosine similarity.
"""

from .agreement import AnnotationSheet, cohen_kappa, pooled_kappa, sample_pairs
from .ceif import CeifRecord, ContextualProvider, Strategy, load_ceif
from .conllu import DependencyParse, load_conllu
from .dataset import (
    DatasetBundle,
    HomonymEntry,
    LabeledPair,
    SenseEntry,
    SentenceRecord,
    TargetSpan,
    dataset_stats,
    export_pairs,
    load_dataset,
    validate_dataset,
    write_dataset,
)
from .errors import (
    AlignmentError,
    HomosemError,
    ParseError,
    ScoringError,
    StrategyError,
    ValidationError,
)
from .reporting import EvalReport, LayerCurve, aggregate, layer_sweep, run_eval
from .scoring import SimilarityVerdict, cosine, score_triple
from .static_vectors import StaticProvider, VectorTable, load_vectors
from .triples import (
    EvalTriple,
    TripleSet,
    classify_triple,
    filter_same_pos,
    generate_triples,
    load_triples,
    write_triples,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError", "AnnotationSheet", "CeifRecord", "ContextualProvider",
    "DatasetBundle", "DependencyParse", "EvalReport", "EvalTriple",
    "HomonymEntry", "HomosemError", "LabeledPair", "LayerCurve", "ParseError",
    "ScoringError", "SenseEntry", "SentenceRecord", "SimilarityVerdict",
    "StaticProvider", "Strategy", "StrategyError", "TargetSpan", "TripleSet",
    "ValidationError", "VectorTable", "aggregate", "classify_triple",
    "cohen_kappa", "cosine", "dataset_stats", "export_pairs",
    "filter_same_pos", "generate_triples", "layer_sweep", "load_ceif",
    "load_conllu", "load_dataset", "load_triples", "load_vectors",
    "pooled_kappa", "run_eval", "sample_pairs", "score_triple",
    "validate_dataset", "write_dataset", "write_triples",
]
