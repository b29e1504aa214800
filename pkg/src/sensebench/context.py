"""Sentences, stop-word filtering and context windows around a target word."""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from sensebench.errors import ConllFormatError, DataError

_TOKEN_RE = re.compile(r"\w+(?:[-']\w+)*|[^\w\s]")


@dataclass(frozen=True)
class AnnotatedSentence:
    """A tokenized sentence with the position of its target word.

    ``dep_heads`` are 1-based head positions with 0 for the root, as in
    CoNLL files.
    """

    tokens: tuple[str, ...]
    target_index: int
    lemmas: tuple[str, ...] | None = None
    dep_heads: tuple[int, ...] | None = None
    dep_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        n = len(self.tokens)
        if not 0 <= self.target_index < n:
            raise DataError(f"target_index {self.target_index} out of range for {n} tokens")
        for name in ("lemmas", "dep_heads", "dep_labels"):
            value = getattr(self, name)
            if value is not None and len(value) != n:
                raise DataError(f"{name} has {len(value)} entries for {n} tokens")
        if self.dep_heads is not None and any(not 0 <= h <= n for h in self.dep_heads):
            raise DataError("dependency head outside [0, len(tokens)]")

    @property
    def target(self) -> str:
        return self.tokens[self.target_index]

    def text(self) -> str:
        return " ".join(self.tokens)

    def to_record(self) -> dict:
        rec: dict = {"tokens": list(self.tokens), "target_index": self.target_index}
        if self.lemmas is not None:
            rec["lemmas"] = list(self.lemmas)
        if self.dep_heads is not None:
            rec["dep_heads"] = list(self.dep_heads)
        if self.dep_labels is not None:
            rec["dep_labels"] = list(self.dep_labels)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> AnnotatedSentence:
        try:
            return cls(
                tokens=tuple(str(t).lower() for t in rec["tokens"]),
                target_index=int(rec["target_index"]),
                lemmas=_opt_tuple(rec.get("lemmas"), lambda x: str(x).lower()),
                dep_heads=_opt_tuple(rec.get("dep_heads"), int),
                dep_labels=_opt_tuple(rec.get("dep_labels"), str),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DataError):
                raise
            raise DataError(f"bad sentence record: {exc}") from None


def _opt_tuple(values, conv):
    return None if values is None else tuple(conv(v) for v in values)


@dataclass(frozen=True)
class ContextWindow:
    """Context words around a target; ``radius`` is None for dependency contexts."""

    words: tuple[str, ...]
    target_lemma: str
    kind: str = "bow"
    radius: int | None = None

    @property
    def is_empty(self) -> bool:
        return not self.words


def tokenize(text: str) -> list[str]:
    """Fallback tokenizer for raw sentences: lowercased words and punctuation."""
    return _TOKEN_RE.findall(text.lower())


def locate_target(tokens: Iterable[str], lemma: str, lemmas: Iterable[str] | None = None) -> int | None:
    """Index of the first token (or token lemma) equal to ``lemma``, else None."""
    lemma = lemma.lower()
    tokens = list(tokens)
    lemmas = list(lemmas) if lemmas is not None else [None] * len(tokens)
    for i, (tok, lem) in enumerate(zip(tokens, lemmas)):
        if tok.lower() == lemma or (lem is not None and lem.lower() == lemma):
            return i
    return None


def sentence_from_text(text: str, lemma: str) -> AnnotatedSentence | None:
    tokens = tokenize(text)
    idx = locate_target(tokens, lemma)
    if idx is None:
        return None
    return AnnotatedSentence(tuple(tokens), idx)


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a one-token-per-line stop list; ``None`` loads the bundled English list."""
    if path is None:
        text = resources.files("sensebench").joinpath("data/stopwords_en.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def filter_stopwords(s: AnnotatedSentence, stopwords: Iterable[str]) -> AnnotatedSentence:
    """Drop stop words from ``s``; the target token always survives.

    Dependency annotations cannot be re-pointed once tokens disappear, so they
    are dropped whenever anything is removed.
    """
    stops = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    keep = [i for i, tok in enumerate(s.tokens) if i == s.target_index or tok not in stops]
    if len(keep) == len(s.tokens):
        return s
    return AnnotatedSentence(
        tokens=tuple(s.tokens[i] for i in keep),
        target_index=keep.index(s.target_index),
        lemmas=None if s.lemmas is None else tuple(s.lemmas[i] for i in keep),
    )


def _target_lemma(s: AnnotatedSentence, target_lemma: str | None) -> str:
    if target_lemma is not None:
        return target_lemma
    return s.lemmas[s.target_index] if s.lemmas is not None else s.target


def extract_bow_window(s: AnnotatedSentence, radius: int, target_lemma: str | None = None) -> ContextWindow:
    """Up to ``radius`` tokens either side of the target, clipped at sentence edges."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    t = s.target_index
    words = s.tokens[max(0, t - radius) : t] + s.tokens[t + 1 : t + 1 + radius]
    return ContextWindow(tuple(words), _target_lemma(s, target_lemma), "bow", radius)


def extract_dep_context(s: AnnotatedSentence, target_lemma: str | None = None) -> ContextWindow:
    """The target's head (unless it is the root) and its direct dependents, in sentence order."""
    if s.dep_heads is None:
        raise DataError("sentence has no dependency annotation")
    t = s.target_index
    head = s.dep_heads[t]
    picked = [i for i, h in enumerate(s.dep_heads) if i != t and (h == t + 1 or i + 1 == head)]
    return ContextWindow(tuple(s.tokens[i] for i in picked), _target_lemma(s, target_lemma), "dependency")


def read_conllu(source: Iterable[str], target_index: int = 0) -> list[AnnotatedSentence]:
    """Read 10-column CoNLL(-U) rows into sentences.

    Multiword ranges (``1-2``) and empty nodes (``1.1``) are skipped. The
    target position is not part of the format, so every sentence gets
    ``target_index`` (clipped to its length).
    """
    sentences = []
    rows: list[list[str]] = []

    def flush(lineno):
        if rows:
            n = len(rows)
            try:
                sent = AnnotatedSentence(
                    tokens=tuple(r[1].lower() for r in rows),
                    target_index=min(target_index, n - 1),
                    lemmas=tuple(r[2].lower() for r in rows),
                    dep_heads=tuple(int(r[6]) for r in rows),
                    dep_labels=tuple(r[7] for r in rows),
                )
            except DataError as exc:
                raise ConllFormatError(f"sentence ending at line {lineno}: {exc}") from None
            sentences.append(sent)
            rows.clear()

    lineno = 0
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConllFormatError(f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}")
        if "-" in cols[0] or "." in cols[0]:
            continue
        try:
            head = int(cols[6])
        except ValueError:
            raise ConllFormatError(f"line {lineno}: non-integer head {cols[6]!r}") from None
        if head < 0:
            raise ConllFormatError(f"line {lineno}: negative head {head}")
        rows.append(cols)
    flush(lineno)
    return sentences
