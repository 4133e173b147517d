"""Deterministic derivation of random-number streams.

All stochastic operations take either an explicit ``numpy.random.Generator``
or a 64-bit master seed. Sub-streams are derived with :func:`substream`,
which mixes the master seed and an integer task path through numpy's
``SeedSequence`` hash and drives a PCG64 bit generator. Identical
``(master_seed, *path)`` arguments produce identical streams on every
platform, so parallel work can be partitioned by path and recombined in a
fixed order without losing reproducibility.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "as_generator"]


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Generator for the sub-stream identified by ``(master_seed, *path)``."""
    entropy = [int(master_seed)] + [int(p) for p in path]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def as_generator(seed_or_rng) -> np.random.Generator:
    """Coerce an int seed or an existing generator into a Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return substream(int(seed_or_rng))
