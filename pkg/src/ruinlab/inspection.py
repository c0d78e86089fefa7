"""Jump laws and the renewal epochs they generate.

The ruin probability only sees the pure-jump clock through the partial sums
S_n = Z_1 + ... + Z_n of its i.i.d. positive jumps, so this module models
the jump law (five parametric families) and samples the partial-sum
sequence up to a horizon.  All families sample by inverse CDF from the
shared uniform stream, so sequences are deterministic in (law, seed) and
identical across platforms.

Canonical string forms, used by the CLI and config files:
``det:0.5``, ``exp:2.0``, ``gamma:2.0:0.5``, ``unif:0.1:0.9``,
``pareto:1.0:0.8``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincinv

from .errors import CapExceeded, ConfigError
from .rng import PURPOSE_JUMPS, stream, uniforms

CAP_DEFAULT = 10**6
_BLOCK = 512


class JumpLaw:
    """Base class for positive jump distributions."""

    tag = ""

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def has_finite_mean_and_variance(self) -> bool:
        """True iff both mean and variance are finite."""
        return math.isfinite(self.mean()) and math.isfinite(self.variance())

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF draw of `size` jumps from the uniform stream."""
        raise NotImplementedError

    def scaled(self, factor: float) -> "JumpLaw":
        """Law of factor * Z."""
        raise NotImplementedError

    def __str__(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Deterministic(JumpLaw):
    delta: float
    tag = "det"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("deterministic jump must be positive")

    def mean(self) -> float:
        return self.delta

    def variance(self) -> float:
        return 0.0

    def sample(self, gen, size):
        # Consumes no randomness; keeps downstream draws aligned with the
        # fixed-grid estimators.
        return np.full(size, self.delta)

    def scaled(self, factor):
        return Deterministic(factor * self.delta)

    def __str__(self):
        return f"det:{self.delta!r}"


@dataclass(frozen=True)
class Exponential(JumpLaw):
    rate: float
    tag = "exp"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("exponential rate must be positive")

    def mean(self) -> float:
        return 1.0 / self.rate

    def variance(self) -> float:
        return 1.0 / self.rate**2

    def sample(self, gen, size):
        return -np.log(uniforms(gen, size)) / self.rate

    def scaled(self, factor):
        return Exponential(self.rate / factor)

    def __str__(self):
        return f"exp:{self.rate!r}"


@dataclass(frozen=True)
class Gamma(JumpLaw):
    shape: float
    scale: float
    tag = "gamma"

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("gamma shape and scale must be positive")

    def mean(self) -> float:
        return self.shape * self.scale

    def variance(self) -> float:
        return self.shape * self.scale**2

    def sample(self, gen, size):
        return self.scale * gammaincinv(self.shape, uniforms(gen, size))

    def scaled(self, factor):
        return Gamma(self.shape, factor * self.scale)

    def __str__(self):
        return f"gamma:{self.shape!r}:{self.scale!r}"


@dataclass(frozen=True)
class Uniform(JumpLaw):
    a: float
    b: float
    tag = "unif"

    def __post_init__(self):
        # Jumps must be almost surely positive, so a = 0 is rejected.
        if not self.a > 0:
            raise ValueError("uniform lower endpoint must be positive")
        if not self.b > self.a:
            raise ValueError("uniform needs b > a")

    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0

    def sample(self, gen, size):
        return self.a + (self.b - self.a) * uniforms(gen, size)

    def scaled(self, factor):
        return Uniform(factor * self.a, factor * self.b)

    def __str__(self):
        return f"unif:{self.a!r}:{self.b!r}"


@dataclass(frozen=True)
class Pareto(JumpLaw):
    """Pareto with survival (scale/x)^index on x >= scale.

    The mean is infinite for index <= 1, which is the regime the
    infinite-expectation sandwich experiments need; index > 2 restores a
    finite variance.
    """

    scale: float
    index: float
    tag = "pareto"

    def __post_init__(self):
        if not (self.scale > 0 and self.index > 0):
            raise ValueError("pareto scale and index must be positive")

    def mean(self) -> float:
        a = self.index
        return a * self.scale / (a - 1.0) if a > 1.0 else math.inf

    def variance(self) -> float:
        a = self.index
        if a <= 2.0:
            return math.inf
        return a * self.scale**2 / ((a - 1.0) ** 2 * (a - 2.0))

    def sample(self, gen, size):
        return self.scale * uniforms(gen, size) ** (-1.0 / self.index)

    def scaled(self, factor):
        return Pareto(factor * self.scale, self.index)

    def __str__(self):
        return f"pareto:{self.scale!r}:{self.index!r}"


_FAMILIES = {
    "det": (Deterministic, 1),
    "exp": (Exponential, 1),
    "gamma": (Gamma, 2),
    "unif": (Uniform, 2),
    "pareto": (Pareto, 2),
}


def parse_law(text: str) -> JumpLaw:
    """Parse the canonical `family:param[:param]` string form."""
    parts = text.strip().split(":")
    family = parts[0].lower()
    if family not in _FAMILIES:
        raise ConfigError("law", f"unknown jump-law family {family!r} in {text!r}")
    cls, nparams = _FAMILIES[family]
    if len(parts) - 1 != nparams:
        raise ConfigError("law", f"{family!r} takes {nparams} parameter(s), got {text!r}")
    try:
        params = [float(p) for p in parts[1:]]
    except ValueError:
        raise ConfigError("law", f"non-numeric parameter in {text!r}") from None
    try:
        return cls(*params)
    except ValueError as exc:
        raise ConfigError("law", str(exc)) from None


def law_moments(law: JumpLaw) -> tuple[float, float]:
    """Closed-form (mean, variance); either may be inf."""
    return law.mean(), law.variance()


@dataclass(frozen=True)
class InspectionTimes:
    """Strictly increasing partial sums S_1 < S_2 < ... covering a horizon."""

    partial_sums: np.ndarray
    includes_origin: bool = True

    def evaluation_times(self) -> np.ndarray:
        """Partial sums, prefixed with t = 0 when the origin is included."""
        if self.includes_origin:
            return np.concatenate([[0.0], self.partial_sums])
        return self.partial_sums


def _renewal_matrix(
    law: JumpLaw, gen: np.random.Generator, rows: int, horizon: float, cap: int
) -> np.ndarray:
    """(rows, k) matrix of partial sums; every row reaches the horizon.

    Vectorized engine-side variant of `sample_inspection`: rows are
    extended jointly in fixed-width blocks, so the draw layout depends only
    on the jump draws themselves.
    """
    width = 64
    total = law.sample(gen, (rows, width))
    np.cumsum(total, axis=1, out=total)
    while total[:, -1].min() < horizon:
        if total.shape[1] >= cap:
            raise CapExceeded(f"cap {cap} hit before horizon {horizon}")
        extra = law.sample(gen, (rows, width))
        np.cumsum(extra, axis=1, out=extra)
        total = np.hstack([total, total[:, -1:] + extra])
    return total


def sample_inspection(
    law: JumpLaw,
    horizon: float,
    cap: int = CAP_DEFAULT,
    seed: int = 0,
    includes_origin: bool = True,
) -> InspectionTimes:
    """Partial sums up to and including the first one reaching the horizon.

    Deterministic in (law, horizon, cap, seed).  Raises `CapExceeded` (never
    truncates silently) if `cap` sums are generated before the horizon is
    reached.  Deterministic laws produce the exact arithmetic progression
    delta * {1, 2, ...} without consuming randomness.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if isinstance(law, Deterministic):
        m = int(math.ceil(horizon / law.delta))
        m = max(m, 1)
        if m > cap:
            raise CapExceeded(f"deterministic law needs {m} jumps, cap is {cap}")
        sums = law.delta * np.arange(1, m + 1)
        return InspectionTimes(partial_sums=sums, includes_origin=includes_origin)

    gen = stream(seed, PURPOSE_JUMPS, 0)
    blocks = []
    total = 0.0
    count = 0
    while True:
        z = law.sample(gen, _BLOCK)
        sums = total + np.cumsum(z)
        hit = np.nonzero(sums >= horizon)[0]
        if hit.size:
            take = hit[0] + 1
            if count + take > cap:
                raise CapExceeded(f"cap {cap} hit before horizon {horizon}")
            blocks.append(sums[:take])
            break
        if count + _BLOCK > cap:
            raise CapExceeded(f"cap {cap} hit before horizon {horizon}")
        blocks.append(sums)
        total = sums[-1]
        count += _BLOCK
    return InspectionTimes(
        partial_sums=np.concatenate(blocks), includes_origin=includes_origin
    )
