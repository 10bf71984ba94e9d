"""Seed derivation.

Every random stream is a ``numpy.random.Generator`` (PCG64) built from
``SeedSequence(master, spawn_key=keys)``. String keys are mapped to stable
integers through CRC32, so the same ``(master, *keys)`` always yields the
same stream and distinct key tuples yield independent streams.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(k) -> int:
    if isinstance(k, (bool, np.bool_)):
        return int(k)
    if isinstance(k, (int, np.integer)):
        if k < 0:
            raise ValueError(f"seed keys must be non-negative, got {k}")
        return int(k)
    return zlib.crc32(str(k).encode()) | (1 << 32)


def seed_sequence(master: int, *keys) -> np.random.SeedSequence:
    if master < 0:
        raise ValueError(f"master seed must be non-negative, got {master}")
    return np.random.SeedSequence(int(master), spawn_key=tuple(_key(k) for k in keys))


def derive_rng(master: int, *keys) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(master, *keys)))


def derive_seed(master: int, *keys) -> int:
    """A 63-bit integer seed, for handing to code that wants a plain int."""
    return int(seed_sequence(master, *keys).generate_state(2, np.uint64)[0] >> np.uint64(1))
