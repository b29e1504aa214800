"""Phrase similarity: composed 2-word phrases correlated with human judgments."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sensebench.composition import compose, configuration_similarity, enumerate_phrase_configs
from sensebench.embeddings import EmbeddingTable, SenseEmbeddingTable, cosine
from sensebench.errors import OOVError, PairFormatError

logger = logging.getLogger(__name__)

CATEGORIES = ("AN", "NN", "VO")
SCORE_MODES = ("single", "max", "min", "mean")
_CATEGORY_ALIASES = {
    "an": "AN",
    "adjectivenouns": "AN",
    "adjective-noun": "AN",
    "nn": "NN",
    "compoundnouns": "NN",
    "noun-noun": "NN",
    "vo": "VO",
    "verbobjects": "VO",
    "verb-object": "VO",
}


@dataclass(frozen=True)
class Judgment:
    participant: str
    score: float


@dataclass
class PhrasePair:
    category: str
    phrase1: tuple[str, str]
    phrase2: tuple[str, str]
    judgments: list[Judgment] = field(default_factory=list)

    @property
    def key(self) -> tuple:
        return (self.category, *self.phrase1, *self.phrase2)

    @property
    def mean_judgment(self) -> float:
        return float(np.mean([j.score for j in self.judgments]))


@dataclass
class CorrelationReport:
    mode: str
    rho: dict[str, float]
    average: float
    n_judgments: int
    n_pairs: int
    skipped_pairs: int
    omitted_categories: list[str] = field(default_factory=list)


def _split(line: str) -> list[str]:
    if "\t" in line:
        return [c.strip() for c in line.split("\t")]
    if "," in line:
        return [c.strip() for c in line.split(",")]
    return line.split()


def load_pairs(source: Iterable[str]) -> list[PhrasePair]:
    """Group judgment rows into phrase pairs.

    Rows are ``participant category w1 w2 w3 w4 score`` separated by tabs,
    commas or whitespace. An 8-column layout with an extra group column after
    the category (as in the distributed dataset) is also read. A first row
    whose score column is not numeric is treated as a header.
    """
    pairs: dict[tuple, PhrasePair] = {}
    for lineno, line in enumerate(source, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = _split(line.rstrip("\r\n"))
        if len(cols) == 8:
            cols = cols[:2] + cols[3:]
        if len(cols) != 7:
            raise PairFormatError(f"line {lineno}: expected 7 columns, got {len(cols)}")
        participant, tag, w1, w2, w3, w4, raw = cols
        try:
            score = float(raw)
        except ValueError:
            if lineno == 1 or not pairs:
                continue
            raise PairFormatError(f"line {lineno}: non-numeric score {raw!r}") from None
        if not math.isfinite(score):
            raise PairFormatError(f"line {lineno}: non-finite score")
        category = _CATEGORY_ALIASES.get(tag.lower())
        if category is None:
            raise PairFormatError(f"line {lineno}: unknown category {tag!r}")
        pair = PhrasePair(category, (w1.lower(), w2.lower()), (w3.lower(), w4.lower()))
        pairs.setdefault(pair.key, pair).judgments.append(Judgment(participant, score))
    return list(pairs.values())


def load_pairs_file(path: str | Path) -> list[PhrasePair]:
    with open(path, encoding="utf-8") as fh:
        return load_pairs(fh)


def score_pair(model: EmbeddingTable | SenseEmbeddingTable, pair: PhrasePair, mode: str = "single") -> float | None:
    """Model similarity for one pair, or None when a word is unrepresentable."""
    if mode not in SCORE_MODES:
        raise ValueError(f"mode must be one of {SCORE_MODES}, got {mode!r}")
    if mode == "single":
        if not isinstance(model, EmbeddingTable):
            raise TypeError("mode 'single' needs a word EmbeddingTable; use max/min/mean for sense tables")
        words = (*pair.phrase1, *pair.phrase2)
        if any(w not in model for w in words):
            return None
        p1 = compose([model[w] for w in pair.phrase1])
        p2 = compose([model[w] for w in pair.phrase2])
        return cosine(p1, p2)
    try:
        c1 = enumerate_phrase_configs(model, *pair.phrase1)
        c2 = enumerate_phrase_configs(model, *pair.phrase2)
    except OOVError:
        return None
    return configuration_similarity(c1, c2, mode)


def _ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    ranks = np.empty(len(x), dtype=np.float64)
    starts = np.flatnonzero(np.r_[True, sx[1:] != sx[:-1]])
    ends = np.r_[starts[1:], len(x)]
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + e + 1) / 2.0
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's rho with average ranks for ties; NaN if either side is constant."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise ValueError("spearman needs at least 2 observations")
    rx, ry = _ranks(x), _ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float(np.dot(rx, rx)) * float(np.dot(ry, ry)))
    if denom == 0.0:
        return float("nan")
    return max(-1.0, min(1.0, float(np.dot(rx, ry)) / denom))


def evaluate_correlation(
    model: EmbeddingTable | SenseEmbeddingTable,
    pairs: Sequence[PhrasePair],
    mode: str = "single",
    per_pair: bool = False,
) -> CorrelationReport:
    """Spearman's rho between model scores and human judgments, per category.

    By default every individual judgment is an observation (the pair's model
    score repeated); ``per_pair=True`` correlates against mean judgments.
    """
    by_cat: dict[str, list[tuple[float, PhrasePair]]] = {c: [] for c in CATEGORIES}
    skipped = 0
    for pair in pairs:
        s = score_pair(model, pair, mode)
        if s is None:
            skipped += 1
        else:
            by_cat[pair.category].append((s, pair))
    rho: dict[str, float] = {}
    omitted = []
    n_obs = 0
    for cat in CATEGORIES:
        scored = by_cat[cat]
        if len(scored) < 2:
            if any(p.category == cat for p in pairs):
                logger.warning("category %s has fewer than 2 scoreable pairs; rho omitted", cat)
            omitted.append(cat)
            continue
        if per_pair:
            model_scores = [s for s, _ in scored]
            human = [p.mean_judgment for _, p in scored]
        else:
            model_scores = [s for s, p in scored for _ in p.judgments]
            human = [j.score for _, p in scored for j in p.judgments]
        r = spearman(model_scores, human)
        if math.isnan(r):
            logger.warning("category %s has constant scores; rho undefined", cat)
            omitted.append(cat)
            continue
        rho[cat] = r
        n_obs += len(human)
    average = float(np.mean(list(rho.values()))) if rho else float("nan")
    return CorrelationReport(
        mode=mode,
        rho=rho,
        average=average,
        n_judgments=n_obs,
        n_pairs=sum(len(v) for v in by_cat.values()),
        skipped_pairs=skipped,
        omitted_categories=omitted,
    )


def format_table(reports: Sequence[tuple[str, CorrelationReport]]) -> str:
    """Aligned text table with one row per model: Model | AN | NN | VO | Average."""
    header = ["Model", *CATEGORIES, "Average"]
    rows = []
    for name, rep in reports:
        cells = [name]
        for cat in CATEGORIES:
            cells.append(f"{rep.rho[cat]:.2f}" if cat in rep.rho else "-")
        cells.append("-" if math.isnan(rep.average) else f"{rep.average:.2f}")
        rows.append(cells)
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(header, widths))]
    lines.append("-+-".join("-" * w for w in widths))
    lines.extend(" | ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows)
    return "\n".join(lines)
