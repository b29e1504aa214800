"""Sense inventories and generation of word-sense discrimination instances.

Inventory documents are JSON objects of the form::

    {"lexemes": [
        {"lemma": "black", "pos": "adjective",
         "senses": [
            {"sense_id": "black.a.03", "definition": "full of anger or hatred",
             "examples": [
                "Or should they rebut the Democrats' black smear campaign?",
                {"tokens": ["black", "hatred"], "target_index": 0}
             ]}
         ]}
    ]}

Raw string examples are tokenized and the target is located as the first
token equal to the lemma; pre-tokenized examples may carry ``target_index``,
``lemmas``, ``dep_heads`` and ``dep_labels``.
"""

from __future__ import annotations

import bisect
import json
import logging
import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from sensebench.context import AnnotatedSentence, locate_target, sentence_from_text
from sensebench.errors import DataError, InventoryError, TaskFormatError
from sensebench.rng import derive_rng

logger = logging.getLogger(__name__)

POS_TAGS = ("adjective", "noun", "verb")
MIN_SENSES, MAX_SENSES = 2, 5
MIN_EXAMPLES = 2

BAND_EDGES = (1, 1_000, 10_000, 50_000, 100_000)
# the frequency-range experiment merges the two lowest and the two highest bands
MERGED_BAND_EDGES = (1, 10_000, 50_000)


@dataclass(frozen=True)
class Sense:
    sense_id: str
    definition: str
    examples: tuple[AnnotatedSentence, ...]


@dataclass(frozen=True)
class Lexeme:
    lemma: str
    pos: str
    senses: tuple[Sense, ...]

    def qualifying_senses(self, min_examples: int = MIN_EXAMPLES) -> list[Sense]:
        return sorted((s for s in self.senses if len(s.examples) >= min_examples), key=lambda s: s.sense_id)


@dataclass
class IngestReport:
    dropped_examples: list[tuple[str, str, str, str]] = field(default_factory=list)
    duplicate_examples: int = 0

    @property
    def drop_count(self) -> int:
        return len(self.dropped_examples)


@dataclass(frozen=True)
class SenseInventory:
    lexemes: tuple[Lexeme, ...]
    report: IngestReport = field(default_factory=IngestReport, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.lexemes)


@dataclass(frozen=True)
class TaskSpec:
    n_senses: int
    seed: int
    dev_fraction: float = 0.2
    pos: tuple[str, ...] = POS_TAGS
    inclusive: bool = False
    repeat: int = 1

    def __post_init__(self):
        if not MIN_SENSES <= self.n_senses <= MAX_SENSES:
            raise ValueError(f"n_senses must be in [{MIN_SENSES}, {MAX_SENSES}], got {self.n_senses}")
        if not 0.0 < self.dev_fraction < 1.0:
            raise ValueError("dev_fraction must lie in (0, 1)")
        if self.repeat < 1:
            raise ValueError("repeat must be >= 1")
        bad = set(self.pos) - set(POS_TAGS)
        if bad:
            raise ValueError(f"unknown part-of-speech filter {sorted(bad)}")


@dataclass(frozen=True)
class Option:
    sentence: AnnotatedSentence
    sense_id: str


@dataclass(frozen=True)
class WsdInstance:
    id: str
    lemma: str
    pos: str
    target_sense_id: str
    target: AnnotatedSentence
    options: tuple[Option, ...]
    gold_index: int

    @property
    def n_options(self) -> int:
        return len(self.options)

    def check(self) -> None:
        """Raise TaskFormatError unless the instance invariants hold."""
        ids = [o.sense_id for o in self.options]
        if len(set(ids)) != len(ids):
            raise TaskFormatError(f"{self.id}: option sense ids are not distinct")
        if not 0 <= self.gold_index < len(self.options):
            raise TaskFormatError(f"{self.id}: gold_index out of range")
        if ids.count(self.target_sense_id) != 1 or ids[self.gold_index] != self.target_sense_id:
            raise TaskFormatError(f"{self.id}: gold option does not carry the target sense")
        if self.options[self.gold_index].sentence.tokens == self.target.tokens:
            raise TaskFormatError(f"{self.id}: target sentence repeated as the gold option")

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "lemma": self.lemma,
            "pos": self.pos,
            "target_sense_id": self.target_sense_id,
            "target": self.target.to_record(),
            "options": [{**o.sentence.to_record(), "sense_id": o.sense_id} for o in self.options],
            "gold_index": self.gold_index,
        }

    @classmethod
    def from_record(cls, rec: dict) -> WsdInstance:
        try:
            inst = cls(
                id=str(rec.get("id") or f"{rec['pos']}.{rec['lemma']}"),
                lemma=str(rec["lemma"]).lower(),
                pos=str(rec["pos"]),
                target_sense_id=str(rec["target_sense_id"]),
                target=AnnotatedSentence.from_record(rec["target"]),
                options=tuple(Option(AnnotatedSentence.from_record(o), str(o["sense_id"])) for o in rec["options"]),
                gold_index=int(rec["gold_index"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TaskFormatError(f"bad task record: {exc}") from None
        inst.check()
        return inst


def _example_sentence(raw, lemma: str) -> AnnotatedSentence | None:
    if isinstance(raw, str):
        return sentence_from_text(raw, lemma)
    if not isinstance(raw, dict) or "tokens" not in raw:
        raise InventoryError(f"example for {lemma!r} must be a string or an object with 'tokens'")
    rec = dict(raw)
    if "target_index" not in rec:
        idx = locate_target([str(t) for t in rec["tokens"]], lemma, rec.get("lemmas"))
        if idx is None:
            return None
        rec["target_index"] = idx
    try:
        return AnnotatedSentence.from_record(rec)
    except DataError as exc:
        raise InventoryError(f"example for {lemma!r}: {exc}") from None


def ingest_inventory(doc: dict) -> SenseInventory:
    """Validate an inventory document and build a :class:`SenseInventory`.

    Examples whose target cannot be located are dropped and listed in
    ``inventory.report``; duplicate examples within a sense are collapsed.
    """
    if not isinstance(doc, dict) or not isinstance(doc.get("lexemes"), list):
        raise InventoryError("inventory must be an object with a 'lexemes' array")
    report = IngestReport()
    seen: set[tuple[str, str]] = set()
    lexemes = []
    for i, lx in enumerate(doc["lexemes"]):
        if not isinstance(lx, dict):
            raise InventoryError(f"lexemes[{i}] is not an object")
        lemma, pos, senses = lx.get("lemma"), lx.get("pos"), lx.get("senses")
        if not isinstance(lemma, str) or not lemma.strip():
            raise InventoryError(f"lexemes[{i}]: missing or empty 'lemma'")
        lemma = lemma.strip().lower()
        if pos not in POS_TAGS:
            raise InventoryError(f"lexemes[{i}] ({lemma}): pos must be one of {POS_TAGS}, got {pos!r}")
        if (lemma, pos) in seen:
            raise InventoryError(f"duplicate lexeme ({lemma}, {pos})")
        seen.add((lemma, pos))
        if not isinstance(senses, list):
            raise InventoryError(f"lexeme ({lemma}, {pos}): 'senses' must be an array")
        sense_ids: set[str] = set()
        parsed = []
        for j, sn in enumerate(senses):
            if not isinstance(sn, dict) or "sense_id" not in sn:
                raise InventoryError(f"lexeme ({lemma}, {pos}) senses[{j}]: missing 'sense_id'")
            sid = str(sn["sense_id"])
            if sid in sense_ids:
                raise InventoryError(f"lexeme ({lemma}, {pos}): duplicate sense_id {sid!r}")
            sense_ids.add(sid)
            examples = sn.get("examples", [])
            if not isinstance(examples, list):
                raise InventoryError(f"lexeme ({lemma}, {pos}) sense {sid}: 'examples' must be an array")
            kept: list[AnnotatedSentence] = []
            for raw in examples:
                sent = _example_sentence(raw, lemma)
                if sent is None:
                    report.dropped_examples.append((lemma, pos, sid, raw if isinstance(raw, str) else str(raw)))
                elif any(k.tokens == sent.tokens for k in kept):
                    report.duplicate_examples += 1
                else:
                    kept.append(sent)
            parsed.append(Sense(sid, str(sn.get("definition", "")), tuple(kept)))
        lexemes.append(Lexeme(lemma, pos, tuple(parsed)))
    if report.drop_count:
        logger.warning("dropped %d examples without a locatable target", report.drop_count)
    return SenseInventory(tuple(lexemes), report)


def load_inventory(path: str | Path) -> SenseInventory:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InventoryError(f"{path}: not valid JSON ({exc})") from None
    return ingest_inventory(doc)


def eligible_lexemes(
    inventory: SenseInventory, n: int, inclusive: bool = False, pos: Iterable[str] = POS_TAGS
) -> list[Lexeme]:
    """Lexemes with more than ``n`` senses that have at least two examples each.

    ``inclusive=True`` relaxes the bound to ``>= n``. Output is sorted by
    (pos, lemma) so inventory order never matters.
    """
    if n < MIN_SENSES:
        raise ValueError("n must be >= 2")
    pos = set(pos)
    out = []
    for lx in inventory.lexemes:
        k = len(lx.qualifying_senses())
        if lx.pos in pos and (k >= n if inclusive else k > n):
            out.append(lx)
    return sorted(out, key=lambda lx: (lx.pos, lx.lemma))


def make_instance(lexeme: Lexeme, n: int, seed: int, repeat: int = 0) -> WsdInstance:
    """Sample one n-sense instance for ``lexeme``.

    Each sampling step draws from its own stream keyed by
    (seed, pos, lemma, n, repeat, step).
    """
    senses = lexeme.qualifying_senses()
    tag = (lexeme.pos, lexeme.lemma, n, repeat)
    chosen = derive_rng(seed, *tag, "senses").choice(len(senses), size=n, replace=False)
    picked = [senses[i] for i in sorted(chosen)]
    target = picked[derive_rng(seed, *tag, "target").integers(n)]
    ex_rng = derive_rng(seed, *tag, "examples")
    t_idx, g_idx = ex_rng.choice(len(target.examples), size=2, replace=False)
    options = []
    for s in picked:
        if s is target:
            options.append(Option(target.examples[g_idx], s.sense_id))
        else:
            options.append(Option(s.examples[ex_rng.integers(len(s.examples))], s.sense_id))
    order = derive_rng(seed, *tag, "shuffle").permutation(n)
    options = [options[i] for i in order]
    gold = next(i for i, o in enumerate(options) if o.sense_id == target.sense_id)
    return WsdInstance(
        id=f"{lexeme.pos}.{lexeme.lemma}.n{n}.r{repeat}",
        lemma=lexeme.lemma,
        pos=lexeme.pos,
        target_sense_id=target.sense_id,
        target=target.examples[t_idx],
        options=tuple(options),
        gold_index=gold,
    )


def build_instances(inventory: SenseInventory, spec: TaskSpec) -> list[WsdInstance]:
    """One instance per eligible lexeme (times ``spec.repeat``)."""
    out = []
    for lx in eligible_lexemes(inventory, spec.n_senses, spec.inclusive, spec.pos):
        for r in range(spec.repeat):
            out.append(make_instance(lx, spec.n_senses, spec.seed, r))
    return out


def split_dev_test(
    instances: Sequence[WsdInstance], spec: TaskSpec
) -> tuple[list[WsdInstance], list[WsdInstance]]:
    """Split by lemma so no lemma lands in both sets.

    ``round(dev_fraction * #lemmas)`` lemmas go to dev: those with the
    lowest seeded per-lemma draw, so a lemma tends to stay on the same side
    across n-sense setups built with one seed.
    """
    lemmas = sorted({inst.lemma for inst in instances})
    n_dev = int(round(spec.dev_fraction * len(lemmas)))
    ranked = sorted(lemmas, key=lambda lemma: (derive_rng(spec.seed, "split", lemma).random(), lemma))
    dev_lemmas = set(ranked[:n_dev])
    dev = [inst for inst in instances if inst.lemma in dev_lemmas]
    test = [inst for inst in instances if inst.lemma not in dev_lemmas]
    return dev, test


def pos_counts(instances: Iterable[WsdInstance]) -> dict[str, int]:
    counts = Counter(inst.pos for inst in instances)
    return {p: counts.get(p, 0) for p in POS_TAGS}


def write_instances(instances: Iterable[WsdInstance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def read_instances(path: str | Path) -> list[WsdInstance]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TaskFormatError(f"{path}:{lineno}: {exc}") from None
            try:
                out.append(WsdInstance.from_record(rec))
            except TaskFormatError as exc:
                raise TaskFormatError(f"{path}:{lineno}: {exc}") from None
    ids = [inst.id for inst in out]
    if len(set(ids)) != len(ids):
        raise TaskFormatError(f"{path}: duplicate instance ids")
    return out


# -- corpus frequencies -------------------------------------------------------


def band_label(lo: float, hi: float) -> str:
    def fmt(x):
        if math.isinf(x):
            return "inf"
        return f"{int(x) // 1000}k" if x >= 1000 and x % 1000 == 0 else str(int(x))

    return f"[{fmt(lo)}, {fmt(hi)})"


@dataclass(frozen=True)
class FrequencyTable:
    counts: dict[str, int]
    edges: tuple[float, ...] = BAND_EDGES

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("band edges must be strictly increasing")
        if any(c < 0 for c in self.counts.values()):
            raise DataError("frequency counts must be non-negative")

    @property
    def labels(self) -> list[str]:
        bounds = [*self.edges, math.inf]
        return [band_label(lo, hi) for lo, hi in zip(bounds, bounds[1:])]

    def with_edges(self, edges: Sequence[float]) -> FrequencyTable:
        return FrequencyTable(self.counts, tuple(edges))


def load_frequencies(path: str | Path, edges: Sequence[float] = BAND_EDGES) -> FrequencyTable:
    """Read ``token<TAB>count`` lines (whitespace also accepted)."""
    counts: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'token<TAB>count'")
            try:
                count = int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer count {parts[1]!r}") from None
            if count < 0:
                raise DataError(f"{path}:{lineno}: negative count")
            counts[parts[0].lower()] = count
    return FrequencyTable(counts, tuple(edges))


def assign_band(freq: FrequencyTable, lemma: str) -> tuple[str, bool]:
    """Band label for ``lemma`` plus a flag set when it was missing from the table.

    Bands are right-open; counts below the lowest edge (including unknown
    lemmas, counted as 0) fall into the lowest band.
    """
    count = freq.counts.get(lemma.lower())
    missing = count is None
    idx = bisect.bisect_right(freq.edges, count or 0) - 1
    return freq.labels[max(idx, 0)], missing


def sample_equal_bands(
    instances: Sequence[WsdInstance], freq: FrequencyTable, seed: int, edges: Sequence[float] = MERGED_BAND_EDGES
) -> list[WsdInstance]:
    """Draw the same number of instances from every band (the smallest band's size)."""
    table = freq.with_edges(edges)
    by_band: dict[str, list[WsdInstance]] = {label: [] for label in table.labels}
    for inst in sorted(instances, key=lambda i: i.id):
        by_band[assign_band(table, inst.lemma)[0]].append(inst)
    empty = [label for label, members in by_band.items() if not members]
    if empty:
        raise DataError(f"empty frequency band(s): {', '.join(empty)}")
    k = min(len(m) for m in by_band.values())
    out = []
    for label, members in by_band.items():
        picks = derive_rng(seed, "bands", label).choice(len(members), size=k, replace=False)
        out.extend(members[i] for i in sorted(picks))
    return out
