"""Named RNG substreams derived from one master seed.

Every random stage draws from its own stream, so adding a stage never
perturbs the draws of earlier ones.
"""
from __future__ import annotations

import numpy as np

_STREAMS = {
    "graph": 1,
    "weights": 2,
    "noise": 3,
    "restarts": 4,
    "replicate": 5,
    "verify": 6,
}


def substream(seed: int, name: str, *indices: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    entropy = [int(seed), _STREAMS[name], *(int(x) for x in indices)]
    return np.random.default_rng(np.random.SeedSequence(entropy))
