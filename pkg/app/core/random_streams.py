"""Counter-based random streams.

Every random draw in the laboratory comes from a numpy ``Generator`` over the
Philox4x64 counter-based bit generator, keyed by ``SeedSequence([seed, stream,
index, ...])``. A given (seed, stream, index) therefore yields the same numbers
in any process, whatever the worker count or scheduling.
"""

from collections.abc import Sequence
from enum import IntEnum

import numpy as np

SeedLike = int | Sequence[int] | np.random.Generator


class Stream(IntEnum):
    """Stream identifiers; one per consumer so draws never overlap."""

    TAU = 1
    BROWNIAN = 2
    HAAR = 3
    MONTE_CARLO = 4
    SUITE = 5


class SuiteTask(IntEnum):
    """Second key of the SUITE stream, one per experiment that draws from it.

    Kept clear of the ``Stream`` ids, which the oracle subject appends to the SUITE key.
    """

    MEAN_VALUE = 10
    EX_DECAY = 11


def make_rng(seed: SeedLike, *key: int) -> np.random.Generator:
    """Return the generator for ``seed`` extended by ``key``.

    An existing ``Generator`` is passed through unchanged (``key`` must then be empty).
    """
    if isinstance(seed, np.random.Generator):
        if key:
            msg = "cannot extend the key of an existing generator"
            raise ValueError(msg)
        return seed
    entropy = [int(seed)] if isinstance(seed, int | np.integer) else [int(s) for s in seed]
    sequence = np.random.SeedSequence(entropy + [int(k) for k in key])
    return np.random.Generator(np.random.Philox(sequence))
