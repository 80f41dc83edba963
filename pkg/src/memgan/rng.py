"""Named, seed-derived random substreams.

Every source of randomness in a run (weight init, latent noise, device
variability, dropout, leakage noise) draws from its own substream derived
from one root seed, so a sweep can vary a single axis without perturbing
the others.
"""

import zlib

import numpy as np


def substream(root_seed: int, name: str) -> np.random.Generator:
    """Generator for the named substream of ``root_seed``.

    Deterministic: same (seed, name) always yields the same stream,
    independent of creation order.
    """
    tag = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([root_seed, tag]))
