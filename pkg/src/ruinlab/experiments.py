"""Experiment orchestration: validated specs, comparison suites, config files.

The comparison suites reproduce the ratio claims that tie the inspected
ruin probability to its comparators: the mean-spaced grid for h < 1/2, the
subordinated-constant asymptotics for h = 1/2, the continuous proxy for
h > 1/2, and the two-sided envelopes in the infinite-mean regime.  Sweeps
are evaluated on shared replications (one path set, several thresholds) so
ratio trends are not drowned in independent-path noise.

Config files are flat ``key = value`` text; keys mirror the CLI flags
one-to-one and unknown keys are errors.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass
from typing import Optional

from . import defaults
from .asymptotics import (
    AsymptoticInputs,
    RuinModel,
    log_asympt_pi,
    log_asympt_psi,
    log_prop2_envelopes,
)
from .errors import ConfigError
from .inspection import JumpLaw, parse_law
from .pickands import S_DEFAULT, estimate_classical, estimate_subordinated
from .records import ResultRecord, write_records
from .ruin_mc import (
    HORIZON_FACTOR_DEFAULT,
    estimate_pi,
    estimate_psi_continuous,
    estimate_psi_discrete,
    ruin_sweep,
)

KINDS = ("mc_pi", "mc_psi", "asympt", "pickands", "compare_ratio", "prop2_sandwich")


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated description of one experiment run."""

    kind: str
    h: float
    c: float
    sweep: tuple[float, ...]
    law: Optional[JumpLaw] = None
    delta: Optional[float] = None
    eta: Optional[float] = None
    reps: int = 10_000
    seed: int = 0
    horizon_factor: float = HORIZON_FACTOR_DEFAULT
    s: Optional[float] = None
    mu: Optional[float] = None
    pickands_classical: Optional[float] = None
    pickands_discrete: Optional[float] = None
    pickands_subordinated: Optional[float] = None
    output_path: Optional[str] = None
    fmt: str = "csv"
    force: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError("kind", f"unknown kind {self.kind!r}")
        if self.reps < 1:
            raise ConfigError("reps", "must be at least 1")
        if not self.sweep:
            raise ConfigError("u", "at least one threshold is required")
        if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
            raise ConfigError("u", "sweep must be strictly increasing")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format", f"unknown format {self.fmt!r}")

    def model(self, u: float) -> RuinModel:
        return RuinModel(h=self.h, c=self.c, u=u)


def derived_seed(seed: int, tag: str) -> int:
    """Deterministic auxiliary seed for a named sub-run of an experiment."""
    digest = hashlib.blake2s(f"{seed}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _mc_record(kind, spec, u, est, law_str=None, delta=None, comparator=None,
               log_comparator=None, wall=None) -> ResultRecord:
    ratio = None
    if comparator is not None and comparator > 0:
        ratio = est.p_hat / comparator
    return ResultRecord(
        kind=kind,
        h=spec.h,
        c=spec.c,
        u=u,
        law=law_str,
        delta=delta,
        p_hat=est.p_hat,
        stderr=est.stderr,
        ci_lo=est.ci95[0],
        ci_hi=est.ci95[1],
        asympt_value=comparator,
        ratio=ratio,
        log_asympt=log_comparator,
        horizon=est.horizon,
        reps=spec.reps,
        seed=spec.seed,
        wall_time_s=wall,
    )


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def run_mc(spec: ExperimentSpec) -> list[ResultRecord]:
    given = [x for x in (spec.law, spec.delta, spec.eta) if x is not None]
    if len(given) != 1:
        raise ConfigError("law", "mc needs exactly one of law, delta, eta")
    records = []
    for u in spec.sweep:
        t0 = time.perf_counter()
        model = spec.model(u)
        if spec.law is not None:
            est = estimate_pi(model, spec.law, spec.reps, spec.horizon_factor, spec.seed)
            rec = _mc_record("mc_pi", spec, u, est, law_str=str(spec.law),
                             wall=time.perf_counter() - t0)
        elif spec.delta is not None:
            est = estimate_psi_discrete(model, spec.delta, spec.reps,
                                        spec.horizon_factor, spec.seed)
            rec = _mc_record("mc_psi", spec, u, est, delta=spec.delta,
                             wall=time.perf_counter() - t0)
        else:
            est = estimate_psi_continuous(model, spec.eta, spec.reps,
                                          spec.horizon_factor, spec.seed)
            rec = _mc_record("mc_psi", spec, u, est, delta=spec.eta,
                             wall=time.perf_counter() - t0)
        records.append(rec)
    return records


def run_asympt(spec: ExperimentSpec) -> list[ResultRecord]:
    records = []
    for u in spec.sweep:
        t0 = time.perf_counter()
        model = spec.model(u)
        if spec.law is not None:
            mu = spec.mu
            if mu is None:
                mu = spec.law.mean()
                if not math.isfinite(mu):
                    mu = None
            inputs = AsymptoticInputs(
                pickands_classical=spec.pickands_classical,
                pickands_subordinated=spec.pickands_subordinated,
                mu=mu,
            )
            log_value = log_asympt_pi(model, inputs)
            kind_tag, law_str, delta = "asympt_pi", str(spec.law), None
        else:
            inputs = AsymptoticInputs(
                pickands_classical=spec.pickands_classical,
                pickands_discrete=spec.pickands_discrete,
                mu=spec.mu,
                delta=spec.delta if spec.delta is not None else 0.0,
            )
            log_value = log_asympt_psi(model, inputs)
            kind_tag, law_str, delta = "asympt_psi", None, inputs.delta
        records.append(ResultRecord(
            kind=kind_tag, h=spec.h, c=spec.c, u=u, law=law_str, delta=delta,
            asympt_value=math.exp(log_value), log_asympt=log_value,
            seed=spec.seed, wall_time_s=time.perf_counter() - t0,
        ))
    return records


def run_pickands(spec: ExperimentSpec) -> list[ResultRecord]:
    s = spec.s if spec.s is not None else S_DEFAULT
    records = []

    def add(kind, est, law_str=None, delta=None):
        records.append(ResultRecord(
            kind=kind, h=spec.h if spec.law is None else None, c=None, u=None,
            law=law_str, delta=delta, p_hat=est.value, stderr=est.stderr,
            horizon=est.truncation_s, reps=est.replications, seed=spec.seed,
        ))

    if spec.law is not None:
        for window in (s, s / 2.0):
            est = estimate_subordinated(spec.law, window, spec.reps, spec.seed)
            add("pickands_subordinated", est, law_str=str(spec.law))
        return records
    delta = spec.delta if spec.delta is not None else 0.0
    eta = spec.eta if spec.eta is not None else 0.0
    kind = "pickands_classical" if delta == 0.0 else "pickands_discrete"
    for window in (s, s / 2.0):
        est = estimate_classical(spec.h, delta, window, spec.reps, eta, spec.seed)
        add(kind, est, delta=delta)
    if delta == 0.0:
        est = estimate_classical(spec.h, 0.0, s, spec.reps, eta / 2.0, spec.seed)
        add(kind, est, delta=0.0)
    return records


def run_compare_ratio(spec: ExperimentSpec) -> list[ResultRecord]:
    """Inspected-ruin estimates against the regime comparator.

    Comparator selection is a pure function of h: the mean-spaced grid
    estimate for h < 1/2, the subordinated-constant asymptotics for
    h = 1/2 (constant estimated from the 2 c^2-scaled law at the window
    and replication count frozen in `defaults`), the fine-grid continuous
    proxy for h > 1/2.  Sweeps share one replication set per estimator.
    """
    if spec.law is None:
        raise ConfigError("law", "compare_ratio needs a jump law")
    if spec.h <= 0.5 and not spec.law.has_finite_mean_and_variance():
        raise ConfigError("law", "h <= 1/2 comparison needs finite mean and variance")
    t0 = time.perf_counter()
    pi_ests = ruin_sweep(spec.h, spec.c, spec.sweep, spec.reps,
                         spec.horizon_factor, spec.seed, law=spec.law)
    records = []
    if spec.h < 0.5:
        mu = spec.law.mean()
        comp = ruin_sweep(spec.h, spec.c, spec.sweep, spec.reps, spec.horizon_factor,
                          derived_seed(spec.seed, "comparator"), delta=mu)
        for u, est, ce in zip(spec.sweep, pi_ests, comp):
            records.append(_mc_record(
                "compare_ratio", spec, u, est, law_str=str(spec.law), delta=mu,
                comparator=ce.p_hat,
                log_comparator=math.log(ce.p_hat) if ce.p_hat > 0 else None,
                wall=time.perf_counter() - t0))
    elif spec.h == 0.5:
        scaled = spec.law.scaled(2.0 * spec.c**2)
        sub_reps = defaults.T2_SUB_REPS
        window = defaults.subordinated_window(sub_reps)
        constant = estimate_subordinated(
            scaled, window, sub_reps, derived_seed(spec.seed, "subordinated"))
        value = min(constant.value, 1.0)  # the constant is provably <= 1
        inputs = AsymptoticInputs(pickands_subordinated=value)
        for u, est in zip(spec.sweep, pi_ests):
            log_comp = log_asympt_pi(spec.model(u), inputs)
            records.append(_mc_record(
                "compare_ratio", spec, u, est, law_str=str(spec.law),
                comparator=math.exp(log_comp), log_comparator=log_comp,
                wall=time.perf_counter() - t0))
    else:
        eta = spec.eta if spec.eta is not None else defaults.R1H_ETA
        comp = ruin_sweep(spec.h, spec.c, spec.sweep, spec.reps, spec.horizon_factor,
                          derived_seed(spec.seed, "comparator"), eta=eta)
        for u, est, ce in zip(spec.sweep, pi_ests, comp):
            records.append(_mc_record(
                "compare_ratio", spec, u, est, law_str=str(spec.law), delta=eta,
                comparator=ce.p_hat,
                log_comparator=math.log(ce.p_hat) if ce.p_hat > 0 else None,
                wall=time.perf_counter() - t0))
    return records


def run_prop2_sandwich(spec: ExperimentSpec) -> list[ResultRecord]:
    """Inspected ruin against the infinite-mean envelopes, two rows per u."""
    if spec.law is None:
        raise ConfigError("law", "prop2_sandwich needs a jump law")
    if spec.h >= 0.5:
        raise ConfigError("h", "the sandwich regime needs h < 1/2")
    if spec.law.has_finite_mean_and_variance() or math.isfinite(spec.law.mean()):
        raise ConfigError("law", "the sandwich regime needs an infinite-mean law")
    t0 = time.perf_counter()
    pi_ests = ruin_sweep(spec.h, spec.c, spec.sweep, spec.reps,
                         spec.horizon_factor, spec.seed, law=spec.law)
    records = []
    for u, est in zip(spec.sweep, pi_ests):
        log_lo, log_up = log_prop2_envelopes(spec.model(u))
        wall = time.perf_counter() - t0
        for kind, log_env in (("prop2_lower", log_lo), ("prop2_upper", log_up)):
            records.append(_mc_record(
                kind, spec, u, est, law_str=str(spec.law),
                comparator=math.exp(log_env), log_comparator=log_env, wall=wall))
    return records


_RUNNERS = {
    "mc_pi": run_mc,
    "mc_psi": run_mc,
    "asympt": run_asympt,
    "pickands": run_pickands,
    "compare_ratio": run_compare_ratio,
    "prop2_sandwich": run_prop2_sandwich,
}


def run_spec(spec: ExperimentSpec) -> list[ResultRecord]:
    records = _RUNNERS[spec.kind](spec)
    if spec.output_path is not None:
        write_records(spec.output_path, records, force=spec.force, fmt=spec.fmt)
    return records


# ---------------------------------------------------------------------------
# Flat key = value config files
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "kind", "h", "c", "u", "law", "delta", "eta", "reps", "seed",
    "horizon_factor", "s", "mu", "pickands_classical", "pickands_discrete",
    "pickands_subordinated", "out", "format", "force",
}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat `key = value` lines; '#' starts a comment."""
    mapping: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {line_no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key in mapping:
            raise ConfigError(key, f"line {line_no}: duplicate key")
        mapping[key] = value
    return mapping


def _as_float(mapping, key) -> Optional[float]:
    if key not in mapping:
        return None
    try:
        return float(mapping[key])
    except ValueError:
        raise ConfigError(key, f"not a number: {mapping[key]!r}") from None


def _as_int(mapping, key, default) -> int:
    if key not in mapping:
        return default
    try:
        return int(mapping[key])
    except ValueError:
        raise ConfigError(key, f"not an integer: {mapping[key]!r}") from None


def spec_from_mapping(mapping: dict[str, str]) -> ExperimentSpec:
    unknown = set(mapping) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    if "kind" not in mapping:
        raise ConfigError("kind", "required key missing")
    # constants have no (c, u); everything else needs the full model triple
    required = () if mapping["kind"] == "pickands" else ("h", "c", "u")
    for key in required:
        if key not in mapping:
            raise ConfigError(key, "required key missing")
    if mapping["kind"] == "pickands" and "law" not in mapping and "h" not in mapping:
        raise ConfigError("h", "the classical constant needs a Hurst parameter")
    try:
        sweep = tuple(float(tok) for tok in mapping.get("u", "1").split(",") if tok.strip())
    except ValueError:
        raise ConfigError("u", f"not a comma-separated number list: {mapping['u']!r}") from None
    law = parse_law(mapping["law"]) if "law" in mapping else None
    force_text = mapping.get("force", "false").lower()
    if force_text not in ("true", "false"):
        raise ConfigError("force", f"expected true or false, got {mapping['force']!r}")
    h = _as_float(mapping, "h")
    c = _as_float(mapping, "c")
    return ExperimentSpec(
        kind=mapping["kind"],
        h=h if h is not None else 0.5,
        c=c if c is not None else 1.0,
        sweep=sweep,
        law=law,
        delta=_as_float(mapping, "delta"),
        eta=_as_float(mapping, "eta"),
        reps=_as_int(mapping, "reps", 10_000),
        seed=_as_int(mapping, "seed", 0),
        horizon_factor=_as_float(mapping, "horizon_factor") or HORIZON_FACTOR_DEFAULT,
        s=_as_float(mapping, "s"),
        mu=_as_float(mapping, "mu"),
        pickands_classical=_as_float(mapping, "pickands_classical"),
        pickands_discrete=_as_float(mapping, "pickands_discrete"),
        pickands_subordinated=_as_float(mapping, "pickands_subordinated"),
        output_path=mapping.get("out"),
        fmt=mapping.get("format", "csv"),
        force=force_text == "true",
    )


def run_config(path) -> int:
    """Parse, validate, execute and persist a config file; returns exit code."""
    from .cli import EXIT_CODES, error_report  # late import; cli owns reporting

    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        error_report("IOFailure", str(exc))
        return EXIT_CODES["IOFailure"]
    try:
        spec = spec_from_mapping(parse_config_text(text))
        run_spec(spec)
    except Exception as exc:  # noqa: BLE001 - single reporting point
        name = type(exc).__name__
        field_name = getattr(exc, "field", None)
        error_report(name, str(exc), field_name)
        return EXIT_CODES.get(name, 1)
    return 0
