"""Deterministic, replication-parallel random number streams.

All randomness flows through counter-based Philox generators keyed by
``(master seed, purpose, chunk index)``.  Replications are processed in
fixed-size chunks of ``CHUNK_REPS`` rows: replication ``i`` owns row
``i % CHUNK_REPS`` of every block drawn from the stream of chunk
``i // CHUNK_REPS``.  The layout depends only on the master seed and the
replication index, never on how chunks are scheduled, so results are
identical for any number of workers.

Gaussian variates come from the inverse normal CDF applied to a midpoint
uniform lattice, ``u = (r + 0.5) * 2**-53`` with ``r`` a 53-bit integer.
The transform is a fixed rational approximation (no rejection sampling, no
generator-internal state), which keeps the uniform-to-normal map exactly
reproducible; it cannot return ``u = 0`` or ``u = 1``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

# Stream purposes; kept disjoint so path noise and jump draws never alias.
PURPOSE_PATH = 0
PURPOSE_JUMPS = 1
PURPOSE_AUX = 2

# Fixed chunk width for replication-parallel estimators.
CHUNK_REPS = 256

_MASK64 = (1 << 64) - 1
_U53 = 1 << 53


def stream(seed: int, purpose: int = PURPOSE_AUX, index: int = 0) -> np.random.Generator:
    """Generator for the (seed, purpose, index) stream.

    ``index`` is a chunk index (or 0 for one-shot samplers); it must stay
    below 2**48 so the key layout ``purpose << 48 | index`` is collision-free.
    """
    if not 0 <= index < (1 << 48):
        raise ValueError("stream index out of range")
    key = [np.uint64(seed & _MASK64), np.uint64((purpose << 48) | index)]
    return np.random.Generator(np.random.Philox(key=key))


def uniforms(gen: np.random.Generator, shape) -> np.ndarray:
    """Uniforms on the open interval (0, 1), 53-bit midpoint lattice."""
    r = gen.integers(0, _U53, size=shape, dtype=np.uint64)
    return (r.astype(np.float64) + 0.5) / _U53


def normals(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via the inverse-CDF transform of `uniforms`."""
    return ndtri(uniforms(gen, shape))
