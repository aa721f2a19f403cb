"""Counter-based random streams.

A stream is identified by ``(seed, *key)``; the key is hashed with SHA-256 (not
Python's salted ``hash``) into a SeedSequence spawn key, so the stream for a
given sample is the same whether it is drawn serially or from a worker pool.
"""
from __future__ import annotations

import hashlib

import numpy as np


def key_words(*key):
    h = hashlib.sha256(repr(tuple(key)).encode()).digest()
    return tuple(int.from_bytes(h[i:i + 4], "little") for i in range(0, 16, 4))


def stream(seed, *key):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key_words(*key))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
