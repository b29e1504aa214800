"""Additive composition and sense-selection strategies.

A word in context is represented by the sum of its own vector and the
vectors of its context words. With a sense table every sense of the target is
contextualized separately (context words contribute their sense centroid),
and two multi-sense items are compared through their closest pair of
composed variants. Phrases are compared over all sense configurations with
a max, min or mean reduction.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from sensebench.context import ContextWindow
from sensebench.embeddings import EmbeddingTable, SenseEmbeddingTable, SenseKey, cosine, sense_centroid, senses_of
from sensebench.errors import OOVError

MONO = "mono"
MODES = ("max", "min", "mean")


@dataclass(frozen=True)
class ComposedVariant:
    """One composed vector; ``sense`` is a SenseKey, a tuple of keys for phrases, or ``MONO``."""

    sense: object
    vector: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SenseConfigurationSet:
    words: tuple[str, str]
    variants: tuple[ComposedVariant, ...]


@dataclass
class Contextualized:
    vector: np.ndarray
    oov_context: int = 0


def compose(vectors: Sequence) -> np.ndarray:
    """Elementwise sum, accumulated left to right."""
    if len(vectors) == 0:
        raise ValueError("compose needs at least one vector")
    out = np.array(vectors[0], dtype=np.float64, copy=True)
    for v in vectors[1:]:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != out.shape:
            raise ValueError(f"length mismatch: {out.shape} vs {v.shape}")
        out += v
    return out


def contextualize_single(
    table: EmbeddingTable, target: str, window: ContextWindow, oov_policy: str = "random"
) -> Contextualized | None:
    """Target vector plus every in-vocabulary context vector.

    Returns None when the target is OOV under ``oov_policy="random"``; the
    caller decides what an unscoreable item means. ``"fail"`` raises instead.
    """
    tv = table.get(target)
    if tv is None:
        if oov_policy == "fail":
            raise OOVError(f"target {target!r} not in embedding table")
        return None
    parts = [tv]
    oov = 0
    for w in window.words:
        v = table.get(w)
        if v is None:
            oov += 1
        else:
            parts.append(v)
    return Contextualized(compose(parts), oov)


def _context_centroids(table: SenseEmbeddingTable, window: ContextWindow) -> tuple[list[np.ndarray], int]:
    vecs, oov = [], 0
    for w in window.words:
        c = sense_centroid(table, w)
        if c is None:
            oov += 1
        else:
            vecs.append(c)
    return vecs, oov


def contextualize_multi(
    table: SenseEmbeddingTable, target_lemma: str, window: ContextWindow, restrict_to: str | None = None
) -> list[ComposedVariant]:
    """One composed variant per sense of ``target_lemma``.

    ``restrict_to`` keeps only the sense with that sense id (oracle labels).
    """
    senses = senses_of(table, target_lemma)
    if not senses:
        raise OOVError(f"lemma {target_lemma!r} has no senses in table")
    if restrict_to is not None:
        senses = [(k, v) for k, v in senses if k.sense_id == restrict_to]
        if not senses:
            raise OOVError(f"lemma {target_lemma!r} has no sense {restrict_to!r}")
    context, _ = _context_centroids(table, window)
    return [ComposedVariant(k, compose([v, *context])) for k, v in senses]


def count_oov_context(table: SenseEmbeddingTable, window: ContextWindow) -> int:
    return _context_centroids(table, window)[1]


def _sense_sort_key(sense) -> tuple:
    if isinstance(sense, SenseKey):
        return ((sense.lemma, sense.sense_id),)
    if isinstance(sense, tuple):
        return tuple(_sense_sort_key(s)[0] for s in sense)
    return ((str(sense), ""),)


def closest_variant_similarity(
    a: Sequence[ComposedVariant], b: Sequence[ComposedVariant]
) -> tuple[float, object, object]:
    """Highest cosine over all variant pairs, with the winning senses.

    Exact ties go to the lexicographically smallest (a-sense, b-sense) pair.
    """
    if not a or not b:
        raise ValueError("closest_variant_similarity needs nonempty variant lists")
    best = None
    for va in a:
        ka = _sense_sort_key(va.sense)
        for vb in b:
            sim = cosine(va.vector, vb.vector)
            rank = (-sim, ka, _sense_sort_key(vb.sense))
            if best is None or rank < best[0]:
                best = (rank, sim, va.sense, vb.sense)
    return best[1], best[2], best[3]


def enumerate_phrase_configs(table: EmbeddingTable | SenseEmbeddingTable, w1: str, w2: str) -> SenseConfigurationSet:
    """All composed sense configurations of the phrase ``w1 w2``."""
    if isinstance(table, SenseEmbeddingTable):
        s1, s2 = senses_of(table, w1), senses_of(table, w2)
        for w, s in ((w1, s1), (w2, s2)):
            if not s:
                raise OOVError(f"{w!r} has no senses in table")
        variants = tuple(ComposedVariant((k1, k2), compose([v1, v2])) for k1, v1 in s1 for k2, v2 in s2)
    else:
        for w in (w1, w2):
            if w not in table:
                raise OOVError(f"{w!r} not in embedding table")
        variants = (ComposedVariant(MONO, compose([table[w1], table[w2]])),)
    return SenseConfigurationSet((w1, w2), variants)


def configuration_similarity(p1: SenseConfigurationSet, p2: SenseConfigurationSet, mode: str = "max") -> float:
    """Reduce cosines over all cross-pairs of configurations by ``mode``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if not p1.variants or not p2.variants:
        raise ValueError("empty sense configuration set")
    sims = [cosine(a.vector, b.vector) for a in p1.variants for b in p2.variants]
    lo, hi = min(sims), max(sims)
    if mode == "max":
        return hi
    if mode == "min":
        return lo
    # summation error can push the mean of near-equal values just outside [lo, hi]
    return min(hi, max(lo, float(np.mean(sims))))
