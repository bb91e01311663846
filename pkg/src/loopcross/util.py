"""Shared plumbing: counter-based RNG streams and deterministic reductions."""

from __future__ import annotations

import hashlib
from typing import Sequence

import numpy as np


def philox_stream(seed: int, *stream_ids) -> np.random.Generator:
    """Independent counter-based stream keyed by (seed, stream ids).

    Philox keys are derived by hashing, so streams for distinct id tuples
    never collide in practice and replicas can run in parallel without
    shared state.
    """
    tag = repr((int(seed),) + tuple(stream_ids)).encode()
    digest = hashlib.sha256(tag).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


def pairwise_sum(values: Sequence[float]) -> float:
    """Sum with a fixed reduction tree so results are order-independent."""
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2 == 1:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def mean_and_stderr(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    if n == 0:
        return 0.0, 0.0
    mean = pairwise_sum(values) / n
    if n == 1:
        return mean, 0.0
    var = pairwise_sum([(v - mean) ** 2 for v in values]) / (n - 1)
    return mean, (var ** 0.5) / (n ** 0.5)
