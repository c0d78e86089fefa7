"""Exact sampling of fractional Brownian motion.

Two samplers cover the two kinds of evaluation sets that show up in ruin
estimation:

* `sample_fbm_grid` — regular grids, via circulant embedding of fractional
  Gaussian noise (FFT, exact in distribution, O(n log n));
* `sample_fbm_points` — arbitrary finite point sets, via dense Cholesky
  factorization of the covariance matrix built from `fbm_cov`.

Both are deterministic functions of their inputs including the seed, with
the Gaussian draws coming from the documented inverse-CDF stream in
:mod:`ruinlab.rng`.  At ``h = 0.5`` both samplers switch to independent
Brownian increments, which is distributionally identical and much faster.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmbeddingNotPSD, FactorizationFailure, TooManyPoints
from .rng import CHUNK_REPS, PURPOSE_PATH, normals, stream

# Circulant eigenvalues below -TOL_EIG abort; small negatives are clamped to 0.
TOL_EIG = 1e-12
# Relative diagonal jitter; escalated x10 at most JITTER_ESCALATIONS times.
TOL_JITTER = 1e-12
JITTER_ESCALATIONS = 3
# Cap on the O(n^3) dense factorization path.
N_MAX = 4096


@dataclass(frozen=True)
class Hurst:
    """Hurst parameter, constrained to the open interval (0, 1)."""

    h: float

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise ValueError(f"Hurst parameter must lie in (0, 1), got {self.h}")

    def __float__(self) -> float:
        return self.h


def _hval(h) -> float:
    return h.h if isinstance(h, Hurst) else float(Hurst(float(h)).h)


@dataclass(frozen=True)
class TimeGrid:
    """Regular grid {0, dt, 2 dt, ..., n dt}."""

    n: int
    dt: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("grid needs at least one step")
        if not self.dt > 0:
            raise ValueError("grid step must be positive")

    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.dt


@dataclass(frozen=True)
class PointSet:
    """Strictly increasing finite set of non-negative evaluation times."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("point set must be a non-empty 1-d sequence")
        if t[0] < 0:
            raise ValueError("points must be non-negative")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("points must be strictly increasing")
        object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class PathSample:
    """fBm values on an evaluation set, tagged with the generating seed."""

    times: np.ndarray
    values: np.ndarray
    seed: int

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")


def fbm_cov(s, t, h) -> np.ndarray:
    """Covariance of standard fBm, (t^{2h} + s^{2h} - |t-s|^{2h}) / 2.

    Accepts scalars or arrays (broadcast); both time arguments must be
    non-negative.
    """
    hh = 2.0 * _hval(h)
    s = np.asarray(s, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    out = 0.5 * (np.abs(t) ** hh + np.abs(s) ** hh - np.abs(t - s) ** hh)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Regular grids: circulant embedding of fractional Gaussian noise
# ---------------------------------------------------------------------------

def _fgn_autocov(n: int, h: float) -> np.ndarray:
    """Autocovariance of unit-step fGn at lags 0..n."""
    k = np.arange(n + 1, dtype=np.float64)
    hh = 2.0 * h
    return 0.5 * ((k + 1.0) ** hh - 2.0 * k**hh + np.abs(k - 1.0) ** hh)


@lru_cache(maxsize=32)
def _circulant_sqrt_spectrum(n: int, h: float) -> np.ndarray:
    """sqrt(lambda / 2n) for the 2n-circulant embedding of n-step fGn.

    The embedding first row is [r_0..r_n, r_{n-1}..r_1]; its FFT is real.
    Eigenvalues in [-TOL_EIG, 0) are clamped to zero, anything lower raises
    `EmbeddingNotPSD`.
    """
    r = _fgn_autocov(n, h)
    row = np.concatenate([r, r[-2:0:-1]])
    lam = np.fft.fft(row).real
    if lam.min() < -TOL_EIG:
        raise EmbeddingNotPSD(
            f"circulant eigenvalue {lam.min():.3e} below -{TOL_EIG:g} "
            f"(n={n}, h={h}); double the embedding or use sample_fbm_points"
        )
    np.clip(lam, 0.0, None, out=lam)
    return np.sqrt(lam / (2 * n))


def _fgn_batch(gen: np.random.Generator, n: int, h: float, rows: int) -> np.ndarray:
    """(rows, n) matrix of unit-step fGn samples, one exact path per row.

    Draw order per row: z[0] and z[1] seed the two real spectral modes,
    then (z[2j], z[2j+1]) the real/imaginary parts of mode j = 1..n-1.
    """
    if h == 0.5:
        return normals(gen, (rows, n))
    sqrt_lam = _circulant_sqrt_spectrum(n, h)
    m = 2 * n
    z = normals(gen, (rows, m))
    w = np.empty((rows, m), dtype=np.complex128)
    w[:, 0] = z[:, 0]
    w[:, n] = z[:, 1]
    mid = (z[:, 2::2] + 1j * z[:, 3::2]) / np.sqrt(2.0)
    w[:, 1:n] = mid
    w[:, n + 1:] = np.conj(mid[:, ::-1])
    return np.fft.fft(w * sqrt_lam, axis=1).real[:, :n]


def _iter_grid_paths(h: float, step: float, n: int, reps: int, seed: int):
    """Yield (first_rep_index, values) blocks of fBm paths on a regular grid.

    `values` has shape (rows, n): the path at the positive grid points
    step, 2*step, ..., n*step (the origin value 0 is implicit).  Replication
    i always draws from row i % CHUNK_REPS of chunk i // CHUNK_REPS; chunks
    are internally sub-batched to bound memory, which does not change the
    draw layout because blocks fill row-major from a sequential stream.
    """
    scale = step**h
    sub = max(1, 2_000_000 // max(n, 1))
    for chunk, start in enumerate(range(0, reps, CHUNK_REPS)):
        rows = min(CHUNK_REPS, reps - start)
        gen = stream(seed, PURPOSE_PATH, chunk)
        done = 0
        while done < rows:
            r = min(sub, rows - done)
            fgn = _fgn_batch(gen, n, h, r)
            fgn *= scale
            yield start + done, np.cumsum(fgn, axis=1)
            done += r


def sample_fbm_grid(grid: TimeGrid, h, seed: int) -> PathSample:
    """Exact fBm sample on a regular grid (values[0] = 0).

    Deterministic in (grid, h, seed).  Raises `EmbeddingNotPSD` if the
    circulant spectrum is genuinely negative (does not occur for fGn at
    practical sizes; small numerical negatives are clamped).
    """
    hv = _hval(h)
    gen = stream(seed, PURPOSE_PATH, 0)
    fgn = _fgn_batch(gen, grid.n, hv, 1)[0]
    values = np.empty(grid.n + 1)
    values[0] = 0.0
    np.cumsum(fgn * grid.dt**hv, out=values[1:])
    return PathSample(times=grid.times(), values=values, seed=seed)


# ---------------------------------------------------------------------------
# Arbitrary point sets: dense factorization
# ---------------------------------------------------------------------------

def _chol_with_jitter(cov: np.ndarray) -> np.ndarray:
    """Cholesky factor, adding escalating diagonal jitter only on failure."""
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    jitter = TOL_JITTER * cov.diagonal().max()
    eye = np.eye(cov.shape[0])
    for _ in range(JITTER_ESCALATIONS + 1):
        try:
            return np.linalg.cholesky(cov + jitter * eye)
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise FactorizationFailure(
        f"covariance of {cov.shape[0]} points not PSD after jitter {jitter:.3e}"
    )


def _brownian_at(times: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Brownian values at strictly increasing positive times from unit normals."""
    dt = np.diff(times, prepend=0.0)
    return np.cumsum(np.sqrt(dt) * z, axis=-1)


def sample_fbm_points(points: PointSet, h, seed: int, n_max: int = N_MAX) -> PathSample:
    """Exact joint fBm sample at an arbitrary point set.

    Uses one standard normal per point, in point order.  ``t = 0`` entries
    are pinned to 0 without consuming a draw.  For ``h = 0.5`` independent
    Brownian increments replace the dense factorization (distributionally
    identical).
    """
    hv = _hval(h)
    if len(points) > n_max:
        raise TooManyPoints(f"{len(points)} points exceeds cap {n_max}")
    t = points.times
    gen = stream(seed, PURPOSE_PATH, 0)
    positive = t[t > 0]
    values = np.zeros(t.size)
    if positive.size:
        z = normals(gen, positive.size)
        if hv == 0.5:
            vals = _brownian_at(positive, z)
        else:
            cov = fbm_cov(positive[:, None], positive[None, :], hv)
            vals = _chol_with_jitter(cov) @ z
        values[t > 0] = vals
    return PathSample(times=t, values=values, seed=seed)
