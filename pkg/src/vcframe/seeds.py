"""Deterministic seed derivation shared by all randomized components.

Every randomized routine takes an integer seed and derives child seeds for
its sub-tasks through `derive_seed`, so a single run seed reproduces the
whole computation (independent of PYTHONHASHSEED).
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(seed: int, *parts: object) -> int:
    """Mix `seed` with a label path into a fresh 63-bit child seed."""
    h = hashlib.blake2b(digest_size=8)
    h.update(repr((seed,) + parts).encode())
    return int.from_bytes(h.digest(), "big") >> 1


def rng_for(seed: int, *parts: object) -> random.Random:
    """A `random.Random` scoped to (seed, *parts)."""
    return random.Random(derive_seed(seed, *parts))
