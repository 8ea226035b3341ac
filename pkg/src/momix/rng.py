"""Deterministic random-stream management.

Every stochastic routine in the package draws from a counter-based Philox
generator keyed by a 64-bit stream id, so results are identical no matter how
work is scheduled across threads.
"""

import hashlib

import numpy as np


def derive_seed(*parts) -> int:
    """Derive a stable 64-bit seed from an arbitrary tuple of parts.

    Parts are rendered to a canonical string, so derive_seed(1, "a") is stable
    across processes and platforms (unlike the builtin salted hash).
    """
    tag = ":".join(repr(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(tag, digest_size=8).digest(), "big")


def stream(seed: int, *substream) -> np.random.Generator:
    """Return a fresh Philox generator for the given seed and substream id.

    The same (seed, substream) always yields the same draws; distinct
    substreams are statistically independent.
    """
    key = derive_seed(seed, *substream) if substream else int(seed)
    return np.random.Generator(np.random.Philox(key=key & ((1 << 64) - 1)))
