"""Evaluation toolkit for additive composition over word and sense embeddings.

Two pipelines are provided: a word-sense discrimination benchmark generated
from a sense inventory, and a phrase-similarity protocol scored against human
judgments with Spearman's rho.
"""

from sensebench.composition import (
    compose,
    configuration_similarity,
    contextualize_multi,
    contextualize_single,
    closest_variant_similarity,
    enumerate_phrase_configs,
)
from sensebench.context import (
    AnnotatedSentence,
    ContextWindow,
    extract_bow_window,
    extract_dep_context,
    filter_stopwords,
    read_conllu,
)
from sensebench.embeddings import (
    EmbeddingTable,
    SenseEmbeddingTable,
    SenseKey,
    cosine,
    load_embeddings,
    load_embeddings_file,
    load_sense_embeddings,
    load_sense_embeddings_file,
)
from sensebench.errors import DataError

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence",
    "ContextWindow",
    "DataError",
    "EmbeddingTable",
    "SenseEmbeddingTable",
    "SenseKey",
    "closest_variant_similarity",
    "compose",
    "configuration_similarity",
    "contextualize_multi",
    "contextualize_single",
    "cosine",
    "enumerate_phrase_configs",
    "extract_bow_window",
    "extract_dep_context",
    "filter_stopwords",
    "load_embeddings",
    "load_embeddings_file",
    "load_sense_embeddings",
    "load_sense_embeddings_file",
    "read_conllu",
]
