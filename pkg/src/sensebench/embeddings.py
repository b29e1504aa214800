"""Word and sense embedding tables.

Both tables are read from the usual whitespace text format::

    [count dim]
    token v1 v2 ... vd

Vectors are stored unnormalized in a single read-only float matrix; the
tables are never mutated after loading and can be shared freely between
evaluators.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sensebench.errors import EmbeddingFormatError

logger = logging.getLogger(__name__)

DEFAULT_SEPARATOR = "%"


@dataclass(frozen=True, order=True)
class SenseKey:
    """Identity of one sense: ``lemma%sense_id``."""

    lemma: str
    sense_id: str

    def __post_init__(self):
        if not self.lemma:
            raise ValueError("sense key lemma must be nonempty")

    def render(self, separator: str = DEFAULT_SEPARATOR) -> str:
        if separator in self.lemma:
            raise ValueError(f"lemma {self.lemma!r} contains separator {separator!r}")
        return f"{self.lemma}{separator}{self.sense_id}"

    @classmethod
    def parse(cls, text: str, separator: str = DEFAULT_SEPARATOR) -> SenseKey:
        lemma, sep, sense_id = text.partition(separator)
        if not sep or not lemma:
            raise ValueError(f"not a sense key: {text!r}")
        return cls(lemma.lower(), sense_id)

    def __str__(self) -> str:
        return self.render()


def _freeze(matrix: np.ndarray) -> np.ndarray:
    matrix.flags.writeable = False
    return matrix


@dataclass(frozen=True)
class EmbeddingTable:
    """Token to vector lookup backed by one matrix."""

    dimension: int
    vocab: dict[str, int]
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def from_dict(cls, entries: dict[str, Iterable[float]]) -> EmbeddingTable:
        if not entries:
            raise EmbeddingFormatError("embedding table needs at least one entry")
        tokens = list(entries)
        matrix = np.array([np.asarray(entries[t], dtype=np.float64) for t in tokens])
        if matrix.ndim != 2 or matrix.shape[1] == 0:
            raise EmbeddingFormatError("all vectors must share one positive dimension")
        return cls(matrix.shape[1], {t: i for i, t in enumerate(tokens)}, _freeze(matrix))

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def __len__(self) -> int:
        return len(self.vocab)

    def get(self, token: str) -> np.ndarray | None:
        row = self.vocab.get(token)
        return None if row is None else self.matrix[row]

    def __getitem__(self, token: str) -> np.ndarray:
        return self.matrix[self.vocab[token]]

    def scaled(self, factor: float) -> EmbeddingTable:
        return EmbeddingTable(self.dimension, dict(self.vocab), _freeze(self.matrix * factor))


@dataclass(frozen=True)
class SenseEmbeddingTable:
    """Sense-key to vector lookup with a per-lemma index.

    ``lemma_index`` maps each lemma to its sense keys sorted by sense id.
    ``skipped`` counts input lines whose token was not a sense key.
    """

    dimension: int
    keys: dict[SenseKey, int]
    matrix: np.ndarray = field(repr=False)
    lemma_index: dict[str, tuple[SenseKey, ...]] = field(repr=False)
    skipped: int = 0

    @classmethod
    def from_dict(cls, entries: dict[SenseKey, Iterable[float]], skipped: int = 0) -> SenseEmbeddingTable:
        if not entries:
            raise EmbeddingFormatError("sense table needs at least one valid sense key")
        keys = list(entries)
        matrix = np.array([np.asarray(entries[k], dtype=np.float64) for k in keys])
        if matrix.ndim != 2 or matrix.shape[1] == 0:
            raise EmbeddingFormatError("all vectors must share one positive dimension")
        index: dict[str, list[SenseKey]] = {}
        for k in keys:
            index.setdefault(k.lemma, []).append(k)
        lemma_index = {lemma: tuple(sorted(ks, key=lambda k: k.sense_id)) for lemma, ks in index.items()}
        return cls(matrix.shape[1], {k: i for i, k in enumerate(keys)}, _freeze(matrix), lemma_index, skipped)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.lemma_index

    def __len__(self) -> int:
        return len(self.keys)

    def vector(self, key: SenseKey) -> np.ndarray:
        return self.matrix[self.keys[key]]

    def scaled(self, factor: float) -> SenseEmbeddingTable:
        return SenseEmbeddingTable(
            self.dimension, dict(self.keys), _freeze(self.matrix * factor), dict(self.lemma_index), self.skipped
        )


def _data_lines(source: Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(source, 1):
        parts = line.split()
        if parts:
            yield lineno, parts


def _parse_vector(parts: list[str], lineno: int) -> np.ndarray:
    try:
        vec = np.array(parts, dtype=np.float64)
    except ValueError:
        raise EmbeddingFormatError(f"line {lineno}: non-numeric vector component") from None
    if not np.all(np.isfinite(vec)):
        raise EmbeddingFormatError(f"line {lineno}: non-finite vector component")
    return vec


def _is_header(parts: list[str]) -> bool:
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def _read_rows(source: Iterable[str], expect_header: bool | None):
    """Yield ``(lineno, token, vector)`` and check dimensions as we go.

    ``expect_header=None`` sniffs for a ``count dim`` first line.
    """
    lines = _data_lines(source)
    first = next(lines, None)
    if first is None:
        raise EmbeddingFormatError("empty embedding input")
    declared_count = dim = None
    if expect_header or (expect_header is None and _is_header(first[1])):
        lineno, parts = first
        if not _is_header(parts):
            raise EmbeddingFormatError(f"line {lineno}: expected 'count dim' header")
        declared_count, dim = int(parts[0]), int(parts[1])
        if dim <= 0:
            raise EmbeddingFormatError(f"line {lineno}: header dimension must be positive")
        first = next(lines, None)
        if first is None:
            raise EmbeddingFormatError("header present but no vectors follow")
    rows = 0
    for lineno, parts in _chain(first, lines):
        if len(parts) < 2:
            raise EmbeddingFormatError(f"line {lineno}: token without vector")
        vec = _parse_vector(parts[1:], lineno)
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise EmbeddingFormatError(f"line {lineno}: dimension mismatch (expected {dim}, got {len(vec)})")
        rows += 1
        yield lineno, parts[0], vec
    if declared_count is not None and declared_count != rows:
        raise EmbeddingFormatError(f"header declares {declared_count} vectors but body has {rows}")


def _chain(first, rest):
    yield first
    yield from rest


def load_embeddings(source: Iterable[str], expect_header: bool | None = None) -> EmbeddingTable:
    """Parse a text embedding stream into an :class:`EmbeddingTable`.

    Duplicate tokens keep the last vector seen and log a warning.
    """
    entries: dict[str, np.ndarray] = {}
    for lineno, token, vec in _read_rows(source, expect_header):
        if token in entries:
            logger.warning("line %d: duplicate token %r, keeping the later vector", lineno, token)
            del entries[token]
        entries[token] = vec
    return EmbeddingTable.from_dict(entries)


def load_sense_embeddings(
    source: Iterable[str], separator: str = DEFAULT_SEPARATOR, expect_header: bool | None = None
) -> SenseEmbeddingTable:
    """Parse a sense embedding stream whose tokens look like ``lemma%sense``.

    Lines whose token is not a sense key are skipped and counted in
    ``table.skipped``.
    """
    entries: dict[SenseKey, np.ndarray] = {}
    skipped = 0
    for lineno, token, vec in _read_rows(source, expect_header):
        try:
            key = SenseKey.parse(token, separator)
        except ValueError:
            skipped += 1
            continue
        if key in entries:
            logger.warning("line %d: duplicate sense key %r, keeping the later vector", lineno, token)
            del entries[key]
        entries[key] = vec
    if skipped:
        logger.warning("skipped %d lines without a %r sense separator", skipped, separator)
    if not entries:
        raise EmbeddingFormatError("no valid sense keys in input")
    return SenseEmbeddingTable.from_dict(entries, skipped=skipped)


def _open_lines(path: str | Path) -> Iterator[str]:
    with open(path, encoding="utf-8", newline=None) as fh:
        yield from fh


def load_embeddings_file(path: str | Path, expect_header: bool | None = None) -> EmbeddingTable:
    return load_embeddings(_open_lines(path), expect_header)


def load_sense_embeddings_file(
    path: str | Path, separator: str = DEFAULT_SEPARATOR, expect_header: bool | None = None
) -> SenseEmbeddingTable:
    return load_sense_embeddings(_open_lines(path), separator, expect_header)


def cosine_with_flag(u, v) -> tuple[float, bool]:
    """Cosine similarity plus a flag set when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        return 0.0, True
    sim = float(np.dot(u, v)) / (nu * nv)
    return min(1.0, max(-1.0, sim)), False


def cosine(u, v) -> float:
    """Cosine similarity; 0.0 when either vector is all zeros."""
    return cosine_with_flag(u, v)[0]


def senses_of(table: SenseEmbeddingTable, lemma: str) -> list[tuple[SenseKey, np.ndarray]]:
    return [(k, table.vector(k)) for k in table.lemma_index.get(lemma, ())]


def sense_centroid(table: SenseEmbeddingTable, lemma: str) -> np.ndarray | None:
    keys = table.lemma_index.get(lemma)
    if not keys:
        return None
    if len(keys) == 1:
        return table.vector(keys[0])
    return np.mean([table.vector(k) for k in keys], axis=0)
