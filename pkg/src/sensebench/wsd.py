"""Prediction strategies and accuracy for word-sense discrimination instances.

Every strategy scores the options of an instance, then picks the best one.
Options scoring within ``TIE_TOLERANCE`` of the maximum are tied and one of
them is drawn at random from a stream keyed by (seed, instance id), so a
run is reproducible however instances are distributed over workers.
"""

from __future__ import annotations

import os
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from sensebench.composition import contextualize_multi, contextualize_single, closest_variant_similarity, count_oov_context
from sensebench.context import AnnotatedSentence, ContextWindow, extract_bow_window, extract_dep_context, filter_stopwords
from sensebench.embeddings import EmbeddingTable, SenseEmbeddingTable, cosine
from sensebench.errors import DataError
from sensebench.rng import DEFAULT_SEED, derive_rng
from sensebench.tasks import FrequencyTable, WsdInstance, assign_band

TIE_TOLERANCE = 1e-9
STRATEGIES = ("single", "multi", "multi-oracle", "overlap", "random")
RADII = (1, 2, 4, "dep")


@dataclass(frozen=True)
class Prediction:
    instance_id: str
    chosen_index: int
    scores: tuple[float, ...]
    tie_broken: bool = False
    unscoreable: bool = False
    oov_context: int = 0

    def to_record(self, gold_index: int | None = None) -> dict:
        rec = asdict(self)
        rec["scores"] = list(self.scores)
        if gold_index is not None:
            rec["gold_index"] = gold_index
            rec["correct"] = self.chosen_index == gold_index
        return rec


@dataclass
class EvalReport:
    accuracy: float
    n_instances: int
    n_correct: int
    per_pos: dict[str, float] = field(default_factory=dict)
    per_band: dict[str, float] = field(default_factory=dict)
    ties: int = 0
    unscoreable: int = 0
    oov_context: int = 0
    unknown_band_lemmas: int = 0


def choose(scores: Sequence[float], instance_id: str, seed: int) -> tuple[int, bool]:
    """Argmax with seeded uniform tie-breaking."""
    best = max(scores)
    tied = [i for i, s in enumerate(scores) if s >= best - TIE_TOLERANCE]
    if len(tied) == 1:
        return tied[0], False
    return tied[int(_choice_rng(seed, instance_id).integers(len(tied)))], True


def _choice_rng(seed: int, instance_id: str):
    return derive_rng(seed, "choice", instance_id)


def _random_pick(inst: WsdInstance, seed: int, scores=None, unscoreable=False) -> Prediction:
    n = inst.n_options
    idx = int(_choice_rng(seed, inst.id).integers(n))
    return Prediction(inst.id, idx, tuple(scores or [0.0] * n), tie_broken=False, unscoreable=unscoreable)


def window_for(
    sentence: AnnotatedSentence, radius, stopwords: frozenset[str], target_lemma: str
) -> ContextWindow:
    """Stop-word filtered context of ``sentence``; ``radius="dep"`` for dependency neighbours.

    Dependency contexts are read off the unfiltered parse and stop words are
    removed from the resulting words afterwards.
    """
    if radius == "dep":
        win = extract_dep_context(sentence, target_lemma)
        return ContextWindow(tuple(w for w in win.words if w not in stopwords), win.target_lemma, win.kind)
    return extract_bow_window(filter_stopwords(sentence, stopwords), int(radius), target_lemma)


def _windows(inst: WsdInstance, radius, stopwords) -> tuple[ContextWindow, list[ContextWindow]]:
    target = window_for(inst.target, radius, stopwords, inst.lemma)
    return target, [window_for(o.sentence, radius, stopwords, inst.lemma) for o in inst.options]


def predict_single(
    model: EmbeddingTable,
    inst: WsdInstance,
    radius=2,
    stopwords: frozenset[str] = frozenset(),
    oov_policy: str = "random",
    seed: int = DEFAULT_SEED,
) -> Prediction:
    """Compose the lemma with its context in every sentence and pick the option nearest the target."""
    tw, ows = _windows(inst, radius, stopwords)
    target = contextualize_single(model, inst.lemma, tw, oov_policy)
    if target is None:
        return _random_pick(inst, seed, unscoreable=True)
    scores, oov = [], target.oov_context
    for w in ows:
        opt = contextualize_single(model, inst.lemma, w, oov_policy)
        oov += opt.oov_context
        scores.append(cosine(target.vector, opt.vector))
    idx, tie = choose(scores, inst.id, seed)
    return Prediction(inst.id, idx, tuple(scores), tie, False, oov)


def _predict_multi(model, inst, radius, stopwords, seed, labels) -> Prediction:
    if inst.lemma not in model:
        return _random_pick(inst, seed, unscoreable=True)
    tw, ows = _windows(inst, radius, stopwords)

    def variants(sentence, window):
        sense = None if labels is None else labels.get(sentence.text())
        if sense is not None and not any(k.sense_id == sense for k in model.lemma_index[inst.lemma]):
            raise DataError(f"{inst.id}: label {sense!r} is not a sense of {inst.lemma!r}")
        return contextualize_multi(model, inst.lemma, window, restrict_to=sense)

    target = variants(inst.target, tw)
    oov = count_oov_context(model, tw)
    scores = []
    for opt, w in zip(inst.options, ows):
        scores.append(closest_variant_similarity(target, variants(opt.sentence, w))[0])
        oov += count_oov_context(model, w)
    idx, tie = choose(scores, inst.id, seed)
    return Prediction(inst.id, idx, tuple(scores), tie, False, oov)


def predict_multi(
    model: SenseEmbeddingTable,
    inst: WsdInstance,
    radius=2,
    stopwords: frozenset[str] = frozenset(),
    seed: int = DEFAULT_SEED,
) -> Prediction:
    """Closest composed sense pair between the target and each option."""
    return _predict_multi(model, inst, radius, stopwords, seed, None)


def predict_multi_oracle(
    model: SenseEmbeddingTable,
    inst: WsdInstance,
    labels: Mapping[str, str],
    radius=2,
    stopwords: frozenset[str] = frozenset(),
    seed: int = DEFAULT_SEED,
) -> Prediction:
    """As :func:`predict_multi`, restricting each labeled sentence to its given sense.

    ``labels`` maps a sentence's space-joined tokens to a sense id of the
    instance lemma. The target sentence must be labeled; unlabeled options
    keep all their senses.
    """
    if inst.target.text() not in labels:
        raise DataError(f"{inst.id}: no sense label for the target sentence")
    return _predict_multi(model, inst, radius, stopwords, seed, labels)


def predict_overlap(
    inst: WsdInstance, radius=2, stopwords: frozenset[str] = frozenset(), seed: int = DEFAULT_SEED
) -> Prediction:
    """Count context word types shared between the target window and each option window."""
    tw, ows = _windows(inst, radius, stopwords)
    target_types = set(tw.words)
    scores = [float(len(target_types & set(w.words))) for w in ows]
    idx, tie = choose(scores, inst.id, seed)
    return Prediction(inst.id, idx, tuple(scores), tie)


def predict_random(inst: WsdInstance, seed: int = DEFAULT_SEED) -> Prediction:
    return _random_pick(inst, seed)


def evaluate(
    preds: Sequence[Prediction], instances: Sequence[WsdInstance], freq: FrequencyTable | None = None
) -> EvalReport:
    """Accuracy overall, per part of speech and (with ``freq``) per frequency band."""
    if len(preds) != len(instances):
        raise ValueError(f"{len(preds)} predictions for {len(instances)} instances")
    if not instances:
        raise ValueError("nothing to evaluate")
    hits: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    bands: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    correct = unknown = 0
    for p, inst in zip(preds, instances):
        if p.instance_id != inst.id:
            raise ValueError(f"prediction {p.instance_id!r} does not match instance {inst.id!r}")
        ok = int(p.chosen_index == inst.gold_index)
        correct += ok
        hits[inst.pos][0] += ok
        hits[inst.pos][1] += 1
        if freq is not None:
            label, missing = assign_band(freq, inst.lemma)
            unknown += missing
            bands[label][0] += ok
            bands[label][1] += 1
    n = len(instances)
    per_band = {}
    if freq is not None:
        per_band = {label: bands[label][0] / bands[label][1] for label in freq.labels if label in bands}
    return EvalReport(
        accuracy=correct / n,
        n_instances=n,
        n_correct=correct,
        per_pos={pos: c / t for pos, (c, t) in sorted(hits.items())},
        per_band=per_band,
        ties=sum(p.tie_broken for p in preds),
        unscoreable=sum(p.unscoreable for p in preds),
        oov_context=sum(p.oov_context for p in preds),
        unknown_band_lemmas=unknown,
    )


# -- batch runner -------------------------------------------------------------

_WORKER: dict = {}


@dataclass(frozen=True)
class RunSettings:
    strategy: str
    radius: object = 2
    stopwords: frozenset[str] = frozenset()
    seed: int = DEFAULT_SEED
    oov_policy: str = "random"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.radius not in RADII:
            raise ValueError(f"radius must be one of {RADII}")


def predict_one(inst: WsdInstance, settings: RunSettings, model=None, labels=None) -> Prediction:
    s = settings
    if s.strategy == "single":
        return predict_single(model, inst, s.radius, s.stopwords, s.oov_policy, s.seed)
    if s.strategy == "multi":
        return predict_multi(model, inst, s.radius, s.stopwords, s.seed)
    if s.strategy == "multi-oracle":
        return predict_multi_oracle(model, inst, labels, s.radius, s.stopwords, s.seed)
    if s.strategy == "overlap":
        return predict_overlap(inst, s.radius, s.stopwords, s.seed)
    return predict_random(inst, s.seed)


def _check_model(settings: RunSettings, model, labels) -> None:
    needs = {"single": EmbeddingTable, "multi": SenseEmbeddingTable, "multi-oracle": SenseEmbeddingTable}
    want = needs.get(settings.strategy)
    if want is not None and not isinstance(model, want):
        raise DataError(f"strategy {settings.strategy!r} needs a {want.__name__}, got {type(model).__name__}")
    if settings.strategy == "multi-oracle" and labels is None:
        raise DataError("strategy 'multi-oracle' needs sense labels")


def _init_worker(settings, model, labels):
    _WORKER.update(settings=settings, model=model, labels=labels)


def _work(chunk: list[WsdInstance]) -> list[Prediction]:
    return [predict_one(inst, _WORKER["settings"], _WORKER["model"], _WORKER["labels"]) for inst in chunk]


def run_strategy(
    instances: Sequence[WsdInstance],
    settings: RunSettings,
    model=None,
    labels: Mapping[str, str] | None = None,
    jobs: int = 1,
) -> list[Prediction]:
    """Predict every instance, optionally across ``jobs`` worker processes.

    Output order follows ``instances`` and does not depend on ``jobs``.
    """
    _check_model(settings, model, labels)
    if jobs <= 1 or len(instances) < 2:
        return [predict_one(inst, settings, model, labels) for inst in instances]
    size = max(1, -(-len(instances) // (jobs * 4)))
    chunks = [list(instances[i : i + size]) for i in range(0, len(instances), size)]
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(settings, model, labels)) as pool:
        return [p for part in pool.map(_work, chunks) for p in part]


def default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def correctness(preds: Iterable[Prediction], instances: Iterable[WsdInstance]) -> list[int]:
    gold = {inst.id: inst.gold_index for inst in instances}
    return [int(p.chosen_index == gold[p.instance_id]) for p in preds]

