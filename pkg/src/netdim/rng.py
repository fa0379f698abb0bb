"""Deterministic seed derivation and counter-based coin flips.

Every random draw in the package flows from one master seed through named
substreams, so a single cell of a large run (one training sample, one null
model trial) can be reproduced in isolation by rebuilding its tag path.
"""

from __future__ import annotations

import hashlib

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def child_seed(master: int, *tags: int | str) -> int:
    """Derive a substream seed from a master seed and a tag path.

    Uses blake2b, so the value is stable across processes and platforms
    (the builtin ``hash`` is neither).
    """
    payload = repr((int(master),) + tags).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def substream(master: int, *tags: int | str) -> np.random.Generator:
    """A numpy generator seeded by ``child_seed(master, *tags)``."""
    return np.random.default_rng(child_seed(master, *tags))


def splitmix64(values: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer over a uint64 array."""
    z = (values + _GOLDEN).astype(np.uint64, copy=False)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def keyed_uniforms(seed: int, keys: np.ndarray) -> np.ndarray:
    """Map integer keys to independent uniforms in [0, 1).

    The value for a key depends only on (seed, key), never on evaluation
    order or batching, so callers may test keyed events (such as per-pair
    edge coins) in any order and draw the same number for the same key.
    """
    mixed = np.asarray(keys, dtype=np.uint64) ^ np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    return (splitmix64(mixed) >> np.uint64(11)) * _INV_2_53
