"""Keyed random streams.

Every stochastic routine in the package draws from a generator keyed by
(seed, scope...) so that node latents, edge flips, restarts and trials are
independent streams and any run is reproducible from its seed alone.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["derive_rng", "derive_seed"]


def _scope_words(seed, scope):
    if seed is None:
        raise ValueError("seed must be an integer, not None")
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    words = [seed]
    for part in scope:
        if isinstance(part, str):
            words.append(zlib.crc32(part.encode("utf-8")))
        else:
            words.append(int(part))
    return words


def derive_rng(seed, *scope) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *scope)``.

    Scope parts are strings or integers; strings are hashed with crc32 so the
    mapping is stable across processes and sessions.
    """
    return np.random.default_rng(np.random.SeedSequence(_scope_words(seed, scope)))


def derive_seed(seed, *scope) -> int:
    """Integer child seed for the stream identified by ``(seed, *scope)``."""
    ss = np.random.SeedSequence(_scope_words(seed, scope))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
