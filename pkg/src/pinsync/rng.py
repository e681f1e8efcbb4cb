"""Seeded random streams.

Every stochastic routine takes an integer ``seed``. Streams are PCG64
generators seeded through ``numpy.random.SeedSequence(seed, spawn_key=key)``:

* a single draw (``pin_sample``, ``synth_impulse_eeg``) uses ``key = ()``;
* Monte Carlo replicate ``r`` belongs to block ``r // BLOCK`` and is drawn from
  the stream with ``key = (block,)``, row ``r % BLOCK`` of that block.

Blocks are the unit of parallel work, so the values produced for replicate
``r`` do not depend on the number of workers or on scheduling order.

Normal variates come from the Box-Muller transform of the stream's uniforms.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK = 4096


def stream(seed, *key):
    """PCG64 generator for ``seed`` and the spawn ``key``."""
    if seed is None:
        raise ValueError("an explicit integer seed is required")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))


def box_muller(gen, shape):
    """Two independent arrays of standard normals of the given shape."""
    u1 = 1.0 - gen.random(shape)  # (0, 1]
    u2 = gen.random(shape)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    return radius * np.cos(angle), radius * np.sin(angle)


def default_workers():
    """Worker count from ``PINSYNC_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("PINSYNC_THREADS", "1")))
    except ValueError:
        return 1


def run_blocks(reps, seed, draw, workers=None):
    """Evaluate ``draw(gen, count)`` over the replicate blocks and concatenate.

    ``draw`` must return an array whose first axis has length ``count``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    workers = default_workers() if workers is None else max(1, int(workers))
    nblocks = -(-reps // BLOCK)

    def one(b):
        count = min(BLOCK, reps - b * BLOCK)
        return draw(stream(seed, b), count)

    if workers == 1 or nblocks == 1:
        parts = [one(b) for b in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(nblocks)))
    return np.concatenate(parts, axis=0)
