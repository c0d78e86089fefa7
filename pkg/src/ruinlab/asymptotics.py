"""Closed-form asymptotic evaluators for the ruin probabilities.

Three branches cover the Hurst regimes.  Everything is computed in log
space and exponentiated once, because the Gaussian-tail factor underflows
in linear space already at moderate thresholds; the ``log_*`` variants
expose the log values directly for result records.

The normal survival function goes through the complementary error
function (never ``1 - cdf``), with relative error at the 1e-14 level until
underflow, and an exact log version for the deep tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import log_ndtr, ndtr

from .errors import MissingConstant, WrongBranch
from .gaussian_paths import Hurst, _hval

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class RuinModel:
    """The triple (h, c, u): Hurst index, drift rate, threshold."""

    h: Hurst
    c: float
    u: float

    def __post_init__(self):
        if not isinstance(self.h, Hurst):
            object.__setattr__(self, "h", Hurst(float(self.h)))
        if not self.c > 0:
            raise ValueError("drift rate c must be positive")
        if not self.u > 0:
            raise ValueError("threshold u must be positive")


@dataclass(frozen=True)
class AsymptoticInputs:
    """Constants feeding the asymptotic formulas.

    Pickands-type constants are never hard-coded (no closed forms exist)
    except the Brownian continuous constant, which equals 1; they arrive
    here from the estimators or from the user.
    """

    pickands_classical: Optional[float] = None
    pickands_discrete: Optional[float] = None
    pickands_subordinated: Optional[float] = None
    mu: Optional[float] = None
    delta: float = 0.0

    def __post_init__(self):
        for name in ("pickands_classical", "pickands_discrete", "pickands_subordinated", "mu"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.pickands_subordinated is not None and self.pickands_subordinated > 1.0:
            raise ValueError("subordinated constant cannot exceed 1")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")


def psi_survival(x):
    """Standard normal survival function P(N > x).

    Linear-space value; underflows to 0 for x beyond ~38 (use
    `log_psi_survival` there).
    """
    x = np.asarray(x, dtype=np.float64)
    out = ndtr(-x)
    return out if out.ndim else float(out)


def log_psi_survival(x):
    """log P(N > x), accurate for all x (no underflow)."""
    x = np.asarray(x, dtype=np.float64)
    out = log_ndtr(-x)
    return out if out.ndim else float(out)


def c_h(c: float, h) -> float:
    """The scaling constant c^h / (h^h (1-h)^{1-h})."""
    if not c > 0:
        raise ValueError("c must be positive")
    hv = _hval(h)
    return math.exp(hv * math.log(c) - hv * math.log(hv) - (1.0 - hv) * math.log1p(-hv))


def t_star(c: float, h) -> float:
    """Scaled most-likely ruin epoch h / (c (1 - h)); ruin concentrates near u * t_star."""
    if not c > 0:
        raise ValueError("c must be positive")
    hv = _hval(h)
    return hv / (c * (1.0 - hv))


def _log_branch_continuous(c: float, h: float, u: float, log_const: float) -> float:
    """Continuous-time branch; at h = 1/2 this is the exactly solvable
    Brownian case and reduces symbolically to const * exp(-2cu)."""
    if h == 0.5:
        return log_const - 2.0 * c * u
    x = c_h(c, h) * u ** (1.0 - h)
    pre = (
        (0.5 - 0.5 / h) * math.log(2.0)
        + 0.5 * math.log(math.pi)
        - 0.5 * (math.log(h) + math.log1p(-h))
    )
    return log_const + pre + (1.0 / h - 1.0) * math.log(x) + log_psi_survival(x)


def _log_branch_subbrownian(c: float, h: float, u: float, spacing: float) -> float:
    """h < 1/2 branch; `spacing` is the grid step (discrete ruin) or the
    jump mean (inspected ruin)."""
    x = c_h(c, h) * u ** (1.0 - h)
    return (
        0.5 * _LOG_2PI
        + (h + 0.5) * math.log(h)
        + h * math.log(u)
        - math.log(spacing)
        - (h + 1.0) * math.log(c)
        - (h + 0.5) * math.log1p(-h)
        + log_psi_survival(x)
    )


def log_asympt_psi(model: RuinModel, inputs: AsymptoticInputs) -> float:
    """log of the discrete/continuous ruin asymptotics.

    Branch selection: continuous when delta = 0 or h > 1/2; Brownian
    discrete when h = 1/2 and delta > 0; sub-Brownian discrete when
    h < 1/2 and delta > 0.
    """
    h, c, u = model.h.h, model.c, model.u
    delta = inputs.delta
    if delta == 0.0 or h > 0.5:
        const = inputs.pickands_classical
        if const is None:
            if h != 0.5:
                raise MissingConstant("continuous branch needs pickands_classical")
            const = 1.0  # Brownian continuous constant is exactly 1
        return _log_branch_continuous(c, h, u, math.log(const))
    if h == 0.5:
        if inputs.pickands_discrete is None:
            raise MissingConstant("Brownian discrete branch needs pickands_discrete")
        return math.log(inputs.pickands_discrete) - 2.0 * c * u
    return _log_branch_subbrownian(c, h, u, delta)


def asympt_psi(model: RuinModel, inputs: AsymptoticInputs) -> float:
    return math.exp(log_asympt_psi(model, inputs))


def log_asympt_pi(model: RuinModel, inputs: AsymptoticInputs) -> float:
    """log of the inspected-ruin asymptotics (three Hurst branches)."""
    h, c, u = model.h.h, model.c, model.u
    if h > 0.5:
        if inputs.pickands_classical is None:
            raise MissingConstant("h > 1/2 branch needs pickands_classical")
        return _log_branch_continuous(c, h, u, math.log(inputs.pickands_classical))
    if h == 0.5:
        if inputs.pickands_subordinated is None:
            raise MissingConstant("h = 1/2 branch needs pickands_subordinated")
        return math.log(inputs.pickands_subordinated) - 2.0 * c * u
    if inputs.mu is None:
        raise MissingConstant("h < 1/2 branch needs the jump mean mu")
    return _log_branch_subbrownian(c, h, u, inputs.mu)


def asympt_pi(model: RuinModel, inputs: AsymptoticInputs) -> float:
    return math.exp(log_asympt_pi(model, inputs))


def prop2_envelopes(model: RuinModel) -> tuple[float, float]:
    """Sandwich envelopes for infinite-mean jumps and h < 1/2.

    Returns (lower, upper_rate) = (Psi(C_h u^{1-h}), u^h Psi(C_h u^{1-h})):
    the inspected ruin probability is o(upper_rate) while lower is o(it).
    """
    lo, up = log_prop2_envelopes(model)
    return math.exp(lo), math.exp(up)


def log_prop2_envelopes(model: RuinModel) -> tuple[float, float]:
    h, c, u = model.h.h, model.c, model.u
    if h >= 0.5:
        raise WrongBranch("envelopes are defined for h < 1/2 only")
    log_lower = log_psi_survival(c_h(c, h) * u ** (1.0 - h))
    return log_lower, h * math.log(u) + log_lower
