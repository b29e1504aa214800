"""Seeded random streams.

Every sampling site asks for its own generator, derived from the run seed
plus a tuple of tags (lemma, instance id, site name, ...). Outcomes therefore
do not depend on iteration order or on how work is split across processes.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_SEED = 20170403

_MASK64 = (1 << 64) - 1


def _tag_word(tags: tuple) -> int:
    h = hashlib.blake2b(digest_size=8)
    for tag in tags:
        h.update(repr(tag).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def derive_rng(seed: int, *tags) -> np.random.Generator:
    """Return an independent PCG64 generator for ``(seed, *tags)``."""
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence([seed & _MASK64, _tag_word(tags)])
    return np.random.Generator(np.random.PCG64(ss))
