"""Paired randomization (permutation) test on per-instance correctness."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from sensebench.rng import DEFAULT_SEED, derive_rng

DEFAULT_ROUNDS = 10_000
_CHUNK = 4096


@dataclass(frozen=True)
class SignificanceResult:
    p_value: float
    observed_diff: float
    rounds: int
    seed: int
    exceed_count: int
    n: int

    def to_record(self) -> dict:
        return {
            "p_value": self.p_value,
            "observed_diff": self.observed_diff,
            "rounds": self.rounds,
            "seed": self.seed,
            "exceed_count": self.exceed_count,
            "n": self.n,
            "sided": "two-sided",
        }


def _as_bits(x: Sequence) -> np.ndarray:
    a = np.asarray(x)
    if a.ndim != 1:
        raise ValueError("correctness vectors must be one-dimensional")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("correctness vectors must contain only 0/1 values")
    return a.astype(np.int64)


def permutation_test(
    correct_a: Sequence, correct_b: Sequence, rounds: int = DEFAULT_ROUNDS, seed: int = DEFAULT_SEED
) -> SignificanceResult:
    """Two-sided paired permutation test on the accuracy difference of two systems.

    Each round swaps every (a_i, b_i) pair independently with probability 1/2
    and recomputes |mean(a) - mean(b)|. The p-value is
    (#rounds at least as extreme + 1) / (rounds + 1).
    """
    a, b = _as_bits(correct_a), _as_bits(correct_b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("need at least one paired observation")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n = len(a)
    d = a - b
    observed = abs(int(d.sum()))
    # concordant pairs contribute nothing whether swapped or not
    disc = d[d != 0]
    m = len(disc)
    rng = derive_rng(seed, "permutation")
    exceed = 0
    if m == 0:
        exceed = rounds
    else:
        total = int(disc.sum())
        nbytes = (m + 7) // 8
        done = 0
        while done < rounds:
            k = min(_CHUNK, rounds - done)
            raw = rng.integers(0, 256, size=(k, nbytes), dtype=np.uint8)
            swapped = np.unpackbits(raw, axis=1, count=m).astype(np.int64)
            stat = np.abs(total - 2 * (swapped @ disc))
            exceed += int(np.count_nonzero(stat >= observed))
            done += k
    return SignificanceResult(
        p_value=(exceed + 1) / (rounds + 1),
        observed_diff=observed / n,
        rounds=rounds,
        seed=seed,
        exceed_count=exceed,
        n=n,
    )
