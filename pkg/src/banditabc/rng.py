"""Seed handling.

Every run is driven by one user-facing integer seed.  Internally that seed
is split into named substreams (prior draws, simulator seeds, bandit coin
flips, calibration) so that adding draws to one consumer never shifts the
values seen by another.  Substream derivation hashes the label with
blake2s, which keeps streams with different labels statistically
independent and makes the mapping stable across platforms and sessions.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _label_entropy(label: str) -> int:
    digest = hashlib.blake2s(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, label: str) -> np.random.Generator:
    """Return a Generator for the named substream of ``seed``."""
    ss = np.random.SeedSequence([seed & _MASK64, _label_entropy(label)])
    return np.random.default_rng(ss)


def derive_seed(seed: int, label: str) -> int:
    """Collapse a named substream to a single 64-bit integer seed."""
    ss = np.random.SeedSequence([seed & _MASK64, _label_entropy(label)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def simulation_seeds(seed: int, label: str = "sim"):
    """Yield an endless stream of independent 64-bit simulator seeds."""
    gen = substream(seed, label)
    while True:
        yield int(gen.integers(0, 1 << 64, dtype=np.uint64))
