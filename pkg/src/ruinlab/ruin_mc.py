"""Crude Monte Carlo for the three ruin probabilities.

* `estimate_pi` — ruin inspected at the renewal epochs of a jump law;
* `estimate_psi_discrete` — ruin on the fixed grid delta * {0, 1, 2, ...};
* `estimate_psi_continuous` — the same on a fine eta grid, flagged as a
  downward-biased proxy for the continuous-time probability.

Every run truncates the time axis at T(u) = horizon_factor * u * t_star:
ruin concentrates near u * t_star with Gaussian-tail decay away from it,
so the default factor 6 makes the truncation bias negligible next to the
Monte Carlo noise; a diagnostic flags runs whose running maxima crowd the
end of the window.

Replications are chunk-parallel with derived Philox streams (see
:mod:`ruinlab.rng`); hit counts are integers, so results are identical for
any scheduling of the chunks.  A deterministic jump law is routed through
the identical grid code path as `estimate_psi_discrete`, making the two
estimators bitwise-equal there.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .asymptotics import t_star
from .errors import TooManyPoints
from .gaussian_paths import N_MAX, _chol_with_jitter, _hval, _iter_grid_paths, fbm_cov
from .inspection import CAP_DEFAULT, Deterministic, JumpLaw, _renewal_matrix
from .pickands import grid_steps
from .rng import CHUNK_REPS, PURPOSE_JUMPS, PURPOSE_PATH, normals, stream

HORIZON_FACTOR_DEFAULT = 6.0
# Fraction of replications allowed to attain their running maximum in the
# final 10% of the window before the horizon is flagged as too small.
LATE_MAX_FRACTION = 1e-3

_Z95 = 1.959963984540054


class HorizonTooSmallWarning(UserWarning):
    """Running maxima crowd the end of the truncated horizon."""


@dataclass(frozen=True)
class MCEstimate:
    """Crude Monte Carlo probability estimate with a Wilson 95% interval."""

    p_hat: float
    stderr: float
    replications: int
    ci95: tuple[float, float]
    horizon: float
    seed: int
    horizon_warning: bool = False

    def __post_init__(self):
        lo, hi = self.ci95
        if not (0.0 <= lo <= self.p_hat <= hi <= 1.0):
            raise ValueError("confidence interval must bracket p_hat inside [0, 1]")


def wilson_interval(hits: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; stays accurate for p_hat near 0."""
    if n < 1:
        raise ValueError("need at least one replication")
    p = hits / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n))
    # Wilson brackets the MLE mathematically; clamp away rounding residue.
    return min(max(0.0, center - half), p), max(min(1.0, center + half), p)


def _estimate_from_counts(
    hits: int, reps: int, late: int, horizon: float, seed: int
) -> MCEstimate:
    p = hits / reps
    warn = late / reps > LATE_MAX_FRACTION
    if warn:
        warnings.warn(
            f"{late}/{reps} replications attained their running maximum in the "
            f"final 10% of the horizon {horizon:g}; increase horizon_factor",
            HorizonTooSmallWarning,
            stacklevel=3,
        )
    return MCEstimate(
        p_hat=p,
        stderr=math.sqrt(p * (1.0 - p) / reps),
        replications=reps,
        ci95=wilson_interval(hits, reps),
        horizon=horizon,
        seed=seed,
        horizon_warning=warn,
    )


# ---------------------------------------------------------------------------
# Per-replication running-maximum statistics
# ---------------------------------------------------------------------------

def _grid_ruin_stats(
    h: float, c: float, step: float, n: int, reps: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """max_t (B_h(t) - c t) and its argmax time over the grid step * {0..n}."""
    stats = np.zeros(reps)
    tmax = np.zeros(reps)
    if n < 1:
        return stats, tmax  # only the origin is in range; the maximum is 0
    drift = np.arange(1, n + 1) * (step * c)
    for start, paths in _iter_grid_paths(h, step, n, reps, seed):
        w = paths - drift
        rows = paths.shape[0]
        m = w.max(axis=1)
        idx = w.argmax(axis=1)
        pos = m > 0.0  # otherwise the running maximum sits at the origin
        stats[start:start + rows] = np.where(pos, m, 0.0)
        tmax[start:start + rows] = np.where(pos, (idx + 1) * step, 0.0)
    return stats, tmax


def _points_ruin_stats(
    h: float,
    c: float,
    law: JumpLaw,
    horizon: float,
    reps: int,
    seed: int,
    cap: int,
    n_max: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Running-maximum stats over renewal epochs inside [0, horizon]."""
    stats = np.zeros(reps)
    tmax = np.zeros(reps)
    for chunk, start in enumerate(range(0, reps, CHUNK_REPS)):
        rows = min(CHUNK_REPS, reps - start)
        gen_j = stream(seed, PURPOSE_JUMPS, chunk)
        gen_p = stream(seed, PURPOSE_PATH, chunk)
        t = _renewal_matrix(law, gen_j, rows, horizon, cap)
        inside = t <= horizon
        z = normals(gen_p, t.shape)
        if h == 0.5:
            values = np.cumsum(np.sqrt(np.diff(t, prepend=0.0)) * z, axis=1)
        else:
            counts = inside.sum(axis=1)
            if counts.max() > n_max:
                raise TooManyPoints(
                    f"{counts.max()} inspection points exceed the dense-path "
                    f"cap {n_max}; lower u or horizon_factor"
                )
            values = np.zeros_like(t)
            # group rows by point count and factorize each group as a stack
            for m in np.unique(counts):
                if m == 0:
                    continue
                rows_m = np.nonzero(counts == m)[0]
                tm = t[rows_m, :m]
                cov = fbm_cov(tm[:, :, None], tm[:, None, :], h)
                try:
                    chol = np.linalg.cholesky(cov)
                except np.linalg.LinAlgError:
                    chol = np.stack([_chol_with_jitter(cov[g]) for g in range(len(rows_m))])
                values[rows_m, :m] = np.einsum("gij,gj->gi", chol, z[rows_m, :m])
        w = np.where(inside, values - c * t, -np.inf)
        m = w.max(axis=1)
        idx = w.argmax(axis=1)
        pos = m > 0.0
        stats[start:start + rows] = np.where(pos, m, 0.0)
        tmax[start:start + rows] = np.where(pos, t[np.arange(rows), idx], 0.0)
    return stats, tmax


# ---------------------------------------------------------------------------
# Public estimators
# ---------------------------------------------------------------------------

def _psi_grid(model, delta: float, reps: int, horizon_factor: float, seed: int) -> MCEstimate:
    h, c, u = model.h.h, model.c, model.u
    horizon = horizon_factor * u * t_star(c, h)
    n = grid_steps(horizon, delta)
    stats, tmax = _grid_ruin_stats(h, c, delta, n, reps, seed)
    return _estimate_from_counts(
        int((stats > u).sum()), reps, int((tmax > 0.9 * horizon).sum()), horizon, seed
    )


def estimate_psi_discrete(
    model,
    delta: float,
    reps: int,
    horizon_factor: float = HORIZON_FACTOR_DEFAULT,
    seed: int = 0,
) -> MCEstimate:
    """Ruin probability on the grid delta * {0, 1, ...} within [0, T(u)]."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    return _psi_grid(model, delta, reps, horizon_factor, seed)


def estimate_psi_continuous(
    model,
    eta: float,
    reps: int,
    horizon_factor: float = HORIZON_FACTOR_DEFAULT,
    seed: int = 0,
) -> MCEstimate:
    """Grid proxy for the continuous-time ruin probability.

    Identical to `estimate_psi_discrete` at delta = eta; the result is a
    downward-biased proxy (grid suprema miss excursions between nodes, bias
    O(sqrt(eta)) in the Brownian case).
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    return _psi_grid(model, eta, reps, horizon_factor, seed)


def estimate_pi(
    model,
    law: JumpLaw,
    reps: int,
    horizon_factor: float = HORIZON_FACTOR_DEFAULT,
    seed: int = 0,
    cap: int = CAP_DEFAULT,
    n_max: int = N_MAX,
) -> MCEstimate:
    """Ruin probability inspected at the renewal epochs of `law`.

    A `Deterministic` law is routed through the identical fixed-grid path
    as `estimate_psi_discrete`, so the two results are bitwise-equal at the
    same (model, delta, reps, horizon_factor, seed).
    """
    if isinstance(law, Deterministic):
        return _psi_grid(model, law.delta, reps, horizon_factor, seed)
    h, c, u = model.h.h, model.c, model.u
    horizon = horizon_factor * u * t_star(c, h)
    stats, tmax = _points_ruin_stats(h, c, law, horizon, reps, seed, cap, n_max)
    return _estimate_from_counts(
        int((stats > u).sum()), reps, int((tmax > 0.9 * horizon).sum()), horizon, seed
    )


def ruin_sweep(
    h,
    c: float,
    u_values,
    reps: int,
    horizon_factor: float = HORIZON_FACTOR_DEFAULT,
    seed: int = 0,
    law: JumpLaw | None = None,
    delta: float | None = None,
    eta: float | None = None,
    cap: int = CAP_DEFAULT,
    n_max: int = N_MAX,
) -> list[MCEstimate]:
    """Coupled estimates over a strictly increasing sweep of thresholds.

    All thresholds are evaluated against the same replications on the
    shared horizon T(max u), so differences and ratios along the sweep are
    free of independent-path noise and the indicator sequence is monotone
    per replication.  Exactly one of `law`, `delta`, `eta` selects the
    evaluation set.
    """
    hv = _hval(h)
    u_arr = np.asarray(list(u_values), dtype=np.float64)
    if u_arr.size < 1 or (u_arr.size > 1 and not np.all(np.diff(u_arr) > 0)):
        raise ValueError("u sweep must be non-empty and strictly increasing")
    if sum(x is not None for x in (law, delta, eta)) != 1:
        raise ValueError("exactly one of law, delta, eta must be given")
    horizon = horizon_factor * float(u_arr[-1]) * t_star(c, hv)
    if law is not None and not isinstance(law, Deterministic):
        stats, tmax = _points_ruin_stats(hv, c, law, horizon, reps, seed, cap, n_max)
    else:
        step = law.delta if law is not None else (delta if delta is not None else eta)
        if not step > 0:
            raise ValueError("grid step must be positive")
        n = grid_steps(horizon, step)
        stats, tmax = _grid_ruin_stats(hv, c, step, n, reps, seed)
    late = int((tmax > 0.9 * horizon).sum())
    return [
        _estimate_from_counts(int((stats > u).sum()), reps, late, horizon, seed)
        for u in u_arr
    ]


# ---------------------------------------------------------------------------
# Coupled evaluations for pathwise-inequality tests
# ---------------------------------------------------------------------------

def coupled_grid_indicators(
    model,
    deltas,
    eta: float,
    reps: int,
    horizon_factor: float = HORIZON_FACTOR_DEFAULT,
    seed: int = 0,
) -> dict:
    """Ruin indicators on nested grids evaluated on shared fine-grid paths.

    Every delta must be a positive integer multiple of eta; the delta-grid
    supremum is taken over the corresponding subset of the eta-grid path,
    so indicator(delta) <= indicator(eta) holds replication by replication.
    Returns {delta: bool array} plus the fine-grid indicators under the key
    `eta`.
    """
    h, c, u = model.h.h, model.c, model.u
    horizon = horizon_factor * u * t_star(c, h)
    n = grid_steps(horizon, eta)
    strides = {}
    for d in deltas:
        k = int(round(d / eta))
        if k < 1 or abs(k * eta - d) > 1e-9 * max(d, eta):
            raise ValueError(f"delta {d} is not an integer multiple of eta {eta}")
        strides[d] = k
    drift = np.arange(1, n + 1) * (eta * c)
    out = {d: np.empty(reps, dtype=bool) for d in deltas}
    out["eta"] = np.empty(reps, dtype=bool)
    for start, paths in _iter_grid_paths(h, eta, n, reps, seed):
        rows = paths.shape[0]
        w = paths - drift
        out["eta"][start:start + rows] = w.max(axis=1) > u
        for d, k in strides.items():
            out[d][start:start + rows] = w[:, k - 1::k].max(axis=1) > u
    return out


def coupled_pi_psi_indicators(
    model,
    law: JumpLaw,
    eta: float,
    reps: int,
    horizon_factor: float = HORIZON_FACTOR_DEFAULT,
    seed: int = 0,
    cap: int = CAP_DEFAULT,
) -> tuple[np.ndarray, np.ndarray]:
    """(pi, psi) ruin indicators driven by the same fBm path per replication.

    Inspection epochs are rounded onto the eta grid and the inspected
    supremum is taken over that subset of the shared grid path, so
    pi <= psi holds in every replication.
    """
    h, c, u = model.h.h, model.c, model.u
    horizon = horizon_factor * u * t_star(c, h)
    n = grid_steps(horizon, eta)
    drift = np.arange(1, n + 1) * (eta * c)
    pi_ind = np.empty(reps, dtype=bool)
    psi_ind = np.empty(reps, dtype=bool)
    path_iter = _iter_grid_paths(h, eta, n, reps, seed)
    chunk = -1
    gen_j = None
    for start, paths in path_iter:
        rows = paths.shape[0]
        if start // CHUNK_REPS != chunk or gen_j is None:
            chunk = start // CHUNK_REPS
            gen_j = stream(seed, PURPOSE_JUMPS, chunk)
        t = _renewal_matrix(law, gen_j, rows, horizon, cap)
        w = paths - drift
        psi_ind[start:start + rows] = w.max(axis=1) > u
        idx = np.clip(np.rint(t / eta).astype(np.int64), 0, n)
        for i in range(rows):
            cols = idx[i][(t[i] <= horizon) & (idx[i] >= 1)] - 1
            pi_ind[start + i] = bool(cols.size) and w[i, cols].max() > u
    return pi_ind, psi_ind
