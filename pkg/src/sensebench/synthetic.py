"""Synthetic inventories and embedding tables for calibration and testing.

None of this is needed to evaluate real embeddings; it builds inputs whose
correct behaviour is known in advance (uniform chance level, perfectly
separable senses, one-sense tables that mirror a word table).
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from sensebench.embeddings import EmbeddingTable, SenseEmbeddingTable, SenseKey
from sensebench.rng import derive_rng
from sensebench.tasks import POS_TAGS


def _sentence(rng, lemma: str, vocab: Sequence[str], length: int) -> dict:
    words = [vocab[i] for i in rng.integers(len(vocab), size=length - 1)]
    pos = int(rng.integers(length))
    words.insert(pos, lemma)
    return {"tokens": words, "target_index": pos}


def synthetic_inventory(
    n_lexemes: int,
    seed: int,
    senses: tuple[int, int] = (3, 7),
    examples_per_sense: int = 3,
    vocab_size: int = 400,
    sentence_length: int = 9,
) -> dict:
    """Inventory document with random sentences over a shared vocabulary.

    Sense counts are drawn uniformly from ``senses`` (inclusive); parts of
    speech cycle through adjective/noun/verb.
    """
    vocab = [f"w{i}" for i in range(vocab_size)]
    lexemes = []
    for i in range(n_lexemes):
        rng = derive_rng(seed, "synthetic-inventory", i)
        lemma = f"lex{i}"
        k = int(rng.integers(senses[0], senses[1] + 1))
        lexemes.append(
            {
                "lemma": lemma,
                "pos": POS_TAGS[i % len(POS_TAGS)],
                "senses": [
                    {
                        "sense_id": f"s{j}",
                        "definition": f"sense {j} of {lemma}",
                        "examples": [_sentence(rng, lemma, vocab, sentence_length) for _ in range(examples_per_sense)],
                    }
                    for j in range(k)
                ],
            }
        )
    return {"lexemes": lexemes}


def separable_setup(
    n_lexemes: int,
    n_senses: int,
    seed: int,
    radius: int = 2,
    noise: float = 0.0,
    words_per_sense: int = 6,
    examples_per_sense: int = 3,
    dim: int | None = None,
) -> tuple[dict, EmbeddingTable, SenseEmbeddingTable]:
    """Lexemes whose senses are orthogonal directions with sense-pure contexts.

    Every lexeme has ``n_senses + 1`` senses; sense ``k`` of any lexeme is the
    basis vector ``e_k`` and its example sentences use only context words
    from a vocabulary that also points along ``e_k``. Each example has exactly
    ``radius`` context words on either side, so bag-of-words windows of that
    radius are full. The word table stores each lemma as the sum of its sense
    vectors. ``noise`` adds independent N(0, noise^2) to every component of
    every stored vector (separately for the two tables).
    """
    k_total = n_senses + 1
    dim = dim or k_total
    if dim < k_total:
        raise ValueError("dim must be at least n_senses + 1")
    basis = np.eye(dim)[:k_total]
    vocab = {k: [f"c{k}_{j}" for j in range(words_per_sense)] for k in range(k_total)}
    lexemes = []
    for i in range(n_lexemes):
        rng = derive_rng(seed, "separable", i)
        lemma = f"lex{i}"
        senses = []
        for k in range(k_total):
            examples, seen = [], set()
            while len(examples) < examples_per_sense:
                words = [vocab[k][j] for j in rng.integers(words_per_sense, size=2 * radius)]
                tokens = words[:radius] + [lemma] + words[radius:]
                if tuple(tokens) not in seen:
                    seen.add(tuple(tokens))
                    examples.append({"tokens": tokens, "target_index": radius})
            senses.append({"sense_id": f"s{k}", "definition": f"direction {k}", "examples": examples})
        lexemes.append({"lemma": lemma, "pos": POS_TAGS[i % len(POS_TAGS)], "senses": senses})

    words: dict[str, np.ndarray] = {}
    sense_vecs: dict[SenseKey, np.ndarray] = {}
    for i in range(n_lexemes):
        lemma = f"lex{i}"
        words[lemma] = basis.sum(axis=0)
        for k in range(k_total):
            sense_vecs[SenseKey(lemma, f"s{k}")] = basis[k].copy()
    for k, ws in vocab.items():
        for w in ws:
            words[w] = basis[k].copy()
            sense_vecs[SenseKey(w, "1")] = basis[k].copy()
    if noise > 0:
        rng = derive_rng(seed, "separable-noise")
        for table in (words, sense_vecs):
            for key in table:
                table[key] = table[key] + rng.normal(0.0, noise, size=dim)
    return {"lexemes": lexemes}, EmbeddingTable.from_dict(words), SenseEmbeddingTable.from_dict(sense_vecs)


def random_word_table(vocab: Sequence[str], dim: int, seed: int) -> EmbeddingTable:
    rng = derive_rng(seed, "random-word-table")
    return EmbeddingTable.from_dict({w: rng.normal(size=dim) for w in vocab})


def one_sense_table(table: EmbeddingTable, sense_id: str = "1") -> SenseEmbeddingTable:
    """Sense table with a single sense per word carrying the word's vector."""
    return SenseEmbeddingTable.from_dict({SenseKey(w, sense_id): table[w] for w in table.vocab})


def random_sense_table(
    words: Sequence[str], dim: int, seed: int, senses: tuple[int, int] = (2, 5)
) -> SenseEmbeddingTable:
    rng = derive_rng(seed, "random-sense-table")
    entries = {}
    for w in words:
        for j in range(int(rng.integers(senses[0], senses[1] + 1))):
            entries[SenseKey(w, f"s{j}")] = rng.normal(size=dim)
    return SenseEmbeddingTable.from_dict(entries)


def inventory_vocab(doc: dict) -> list[str]:
    vocab = set()
    for lx in doc["lexemes"]:
        vocab.add(lx["lemma"])
        for s in lx["senses"]:
            for ex in s["examples"]:
                vocab.update(ex["tokens"])
    return sorted(vocab)
