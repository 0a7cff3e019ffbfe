"""Deterministic seed derivation.

A master seed flows top-down; every stochastic sub-task derives its own seed
from ``(master, path...)``, so results do not depend on execution order or
thread count.
"""
from __future__ import annotations

import hashlib
import os

import numpy as np

SEED_ENV = "TNL_SEED"
MAX_SEED = 2**64 - 1


def check_seed(seed) -> int:
    s = int(seed)
    if not 0 <= s <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return s


def child_seed(master: int, *path) -> int:
    """64-bit seed for the sub-task named by ``path``."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(check_seed(master)).encode())
    for part in path:
        h.update(b"/")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "little")


def rng_for(master: int, *path) -> np.random.Generator:
    return np.random.default_rng(child_seed(master, *path))


def resolve_seed(seed=None) -> int:
    """Explicit seed, else ``$TNL_SEED``, else 0."""
    if seed is None:
        env = os.environ.get(SEED_ENV, "").strip()
        seed = env if env else 0
    return check_seed(seed)
