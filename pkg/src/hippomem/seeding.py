"""Deterministic random-stream management.

Every stochastic operation in the package takes an explicit seed or generator.
A single master seed fans out into named child streams so that adding draws to
one consumer never shifts another consumer's stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

SeedLike = "int | np.random.SeedSequence | np.random.Generator"


def as_generator(seed) -> np.random.Generator:
    """Coerce an int, SeedSequence, or Generator into a PCG64 Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    raise TypeError(f"cannot build a Generator from {type(seed).__name__}")


def _stream_key(name: str) -> int:
    # Stable 64-bit tag per stream name; independent of PYTHONHASHSEED.
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_seed(master_seed: int, name: str, index: int = 0) -> np.random.SeedSequence:
    """Child SeedSequence for the named stream under the master seed.

    Distinct (name, index) pairs yield statistically independent streams;
    the same triple always yields the same stream.
    """
    if master_seed < 0:
        raise ValueError(f"master_seed must be non-negative, got {master_seed}")
    return np.random.SeedSequence([int(master_seed), _stream_key(name), int(index)])


def derive_generator(master_seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Generator for the named child stream under the master seed."""
    return as_generator(derive_seed(master_seed, name, index))


def child_seed(master_seed: int, name: str, index: int = 0) -> int:
    """Plain-int seed for the named child stream, for APIs that take ints."""
    return int(derive_seed(master_seed, name, index).generate_state(1, np.uint64)[0])
