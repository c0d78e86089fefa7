"""Acceptance suite: every criterion at its pre-registered tolerance.

Each test prints one PASS/FAIL line (run pytest with -s to see them all)
and persists its result records under acceptance_out/ so the plotting
package can consume them.  Tolerances and run sizes come from
ruinlab.defaults and are not tuned here.

Two criteria are known statistically unattainable as stated and fail
honestly: the long-window recovery of the Brownian continuous constant
(Pareto-tailed sup statistic at S = 100, see the pickands module notes)
and the decreasing half of the infinite-mean sandwich trend (the ratio to
the upper rate still rises everywhere p-hat >= 1e-4).  See the README's
known-failure section; the assertions here are kept as stated.
"""

import math
import time
import warnings
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm
from scipy.stats import qmc

from ruinlab import defaults
from ruinlab.asymptotics import RuinModel, log_psi_survival, psi_survival
from ruinlab.experiments import ExperimentSpec, derived_seed, run_compare_ratio, run_prop2_sandwich
from ruinlab.inspection import parse_law
from ruinlab.pickands import estimate_classical, estimate_subordinated, martingale_check
from ruinlab.records import ResultRecord, write_records
from ruinlab.ruin_mc import (
    HorizonTooSmallWarning,
    coupled_pi_psi_indicators,
    estimate_pi,
    estimate_psi_continuous,
    estimate_psi_discrete,
    ruin_sweep,
)

SEED = 20260811
OUTDIR = Path(__file__).resolve().parent.parent / "acceptance_out"
OUTDIR.mkdir(exist_ok=True)


@pytest.fixture(autouse=True)
def _quiet_horizon_warnings():
    # the horizon diagnostic trips for several pinned configurations by
    # design; expected here, so keep the output readable
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HorizonTooSmallWarning)
        yield


def _report(name: str, ok: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def _dump(name: str, records) -> None:
    write_records(OUTDIR / name, records, force=True)


# ---------------------------------------------------------------------------
# 1. exact Brownian oracle
# ---------------------------------------------------------------------------

def test_exact_brownian_oracle():
    t0 = time.perf_counter()
    model = RuinModel(h=0.5, c=1.0, u=1.0)
    est = estimate_psi_continuous(
        model, eta=defaults.BROWNIAN_ETA, reps=defaults.BROWNIAN_REPS,
        horizon_factor=defaults.BROWNIAN_HORIZON_FACTOR,
        seed=derived_seed(SEED, "brownian-oracle"),
    )
    elapsed = time.perf_counter() - t0
    exact = math.exp(-2.0)
    rel = abs(est.p_hat - exact) / exact
    _dump("mc_brownian.csv", [ResultRecord(
        kind="mc_psi", h=0.5, c=1.0, u=1.0, delta=defaults.BROWNIAN_ETA,
        p_hat=est.p_hat, stderr=est.stderr, ci_lo=est.ci95[0], ci_hi=est.ci95[1],
        asympt_value=exact, ratio=est.p_hat / exact, log_asympt=-2.0,
        horizon=est.horizon, reps=est.replications, seed=est.seed,
        wall_time_s=elapsed,
    )])
    ok = rel <= defaults.BROWNIAN_RTOL and elapsed <= 300.0
    assert _report(
        "exact-brownian-oracle", ok,
        f"p_hat={est.p_hat:.5f} exact={exact:.5f} rel={rel:.3%} time={elapsed:.0f}s",
    )


# ---------------------------------------------------------------------------
# 2. pathwise domination pi <= psi_continuous
# ---------------------------------------------------------------------------

def test_domination_coupled():
    rng = np.random.default_rng(derived_seed(SEED, "domination"))
    families = ("exp:{:.3f}", "gamma:{:.3f}:{:.3f}", "unif:{:.3f}:{:.3f}",
                "pareto:{:.3f}:{:.3f}", "det:{:.3f}")
    violations = 0
    for i in range(defaults.DOMINATION_CONFIGS):
        h = float(rng.uniform(0.15, 0.85))
        c = float(rng.uniform(0.7, 2.0))
        u = float(rng.uniform(0.5, 1.5))
        fam = families[i % len(families)]
        params = rng.uniform(0.3, 2.0, fam.count("{"))
        if fam.startswith("unif"):
            params = np.sort(params) + np.array([0.0, 0.1])
        law = parse_law(fam.format(*params))
        pi_ind, psi_ind = coupled_pi_psi_indicators(
            RuinModel(h=h, c=c, u=u), law, eta=defaults.DOMINATION_ETA,
            reps=defaults.DOMINATION_REPS, seed=derived_seed(SEED, f"dom{i}"),
        )
        violations += int(np.sum(pi_ind & ~psi_ind))
    assert _report(
        "pathwise-domination", violations == 0,
        f"{defaults.DOMINATION_CONFIGS} configs x {defaults.DOMINATION_REPS} reps, "
        f"{violations} violations",
    )


# ---------------------------------------------------------------------------
# 3. deterministic-jump reduction, bitwise
# ---------------------------------------------------------------------------

def test_deterministic_jump_reduction():
    rng = np.random.default_rng(derived_seed(SEED, "det-reduction"))
    all_equal = True
    for i in range(defaults.DET_REDUCTION_CONFIGS):
        model = RuinModel(h=float(rng.uniform(0.2, 0.8)),
                          c=float(rng.uniform(0.5, 2.0)),
                          u=float(rng.uniform(0.5, 1.5)))
        delta = float(rng.uniform(0.05, 0.4))
        seed = int(rng.integers(0, 2**62))
        a = estimate_pi(model, parse_law(f"det:{delta!r}"),
                        defaults.DET_REDUCTION_REPS, seed=seed)
        b = estimate_psi_discrete(model, delta, defaults.DET_REDUCTION_REPS, seed=seed)
        all_equal = all_equal and a == b
    assert _report(
        "deterministic-jump-reduction", all_equal,
        f"{defaults.DET_REDUCTION_CONFIGS} configs bitwise-equal={all_equal}",
    )


# ---------------------------------------------------------------------------
# 4. Brownian continuous-constant recovery at the long window
# ---------------------------------------------------------------------------

def test_h1_recovery_long_window():
    t0 = time.perf_counter()
    est = estimate_classical(
        0.5, delta=0.0, s=defaults.H1_S, reps=defaults.H1_REPS,
        eta=defaults.H1_ETA, seed=derived_seed(SEED, "h1-recovery"),
    )
    elapsed = time.perf_counter() - t0
    half = estimate_classical(
        0.5, delta=0.0, s=defaults.H1_S / 2, reps=defaults.H1_REPS,
        eta=defaults.H1_ETA, seed=derived_seed(SEED, "h1-recovery-half"),
    )
    _dump("pickands_h1.csv", [
        ResultRecord(kind="pickands_classical", h=0.5, delta=0.0, p_hat=e.value,
                     stderr=e.stderr, horizon=e.truncation_s, reps=e.replications,
                     seed=derived_seed(SEED, tag))
        for e, tag in ((est, "h1-recovery"), (half, "h1-recovery-half"))
    ])
    err = abs(est.value - 1.0)
    tol = 4 * est.stderr + defaults.H1_ALLOWANCE
    ok = err <= tol and elapsed <= 600.0
    assert _report(
        "brownian-constant-long-window", ok,
        f"value={est.value:.4f} stderr={est.stderr:.4f} |err|={err:.4f} "
        f"tol={tol:.4f} (S/2 value={half.value:.4f}) time={elapsed:.0f}s",
    )


# ---------------------------------------------------------------------------
# 5. subordinated constant bounded by one
# ---------------------------------------------------------------------------

def test_subordinated_upper_bound():
    rows = []
    ok = True
    detail = []
    for text in defaults.SUB_BOUND_LAWS:
        law = parse_law(text)
        for s in defaults.SUB_BOUND_WINDOWS:
            est = estimate_subordinated(
                law, s, defaults.SUB_BOUND_REPS,
                seed=derived_seed(SEED, f"sub-bound:{text}:{s}"))
            ok = ok and est.value <= 1.0 + 4 * est.stderr
            detail.append(f"{text}@S={s:g}:{est.value:.3f}")
            rows.append(ResultRecord(
                kind="pickands_subordinated", law=text, p_hat=est.value,
                stderr=est.stderr, horizon=s, reps=est.replications,
                seed=derived_seed(SEED, f"sub-bound:{text}:{s}")))
    _dump("pickands_subordinated.csv", rows)
    assert _report("subordinated-constant-bound", ok, " ".join(detail))


# ---------------------------------------------------------------------------
# 6. single-point martingale sanity
# ---------------------------------------------------------------------------

def test_martingale_sanity():
    ok = True
    detail = []
    for text in defaults.SUB_BOUND_LAWS:
        mean, se = martingale_check(
            parse_law(text), defaults.MARTINGALE_REPS,
            seed=derived_seed(SEED, f"martingale:{text}"))
        ok = ok and abs(mean - 1.0) <= defaults.MARTINGALE_SIGMAS * se
        detail.append(f"{text}:{mean:.4f}+-{se:.4f}")
    assert _report("martingale-sanity", ok, " ".join(detail))


# ---------------------------------------------------------------------------
# 7. Brownian-regime ratio stability against the subordinated constant
# ---------------------------------------------------------------------------

def test_brownian_ratio_stability():
    law = parse_law("exp:1")
    c = 1.0
    ests = ruin_sweep(0.5, c, defaults.T2_SWEEP, defaults.T2_REPS,
                      seed=derived_seed(SEED, "t2-pi"), law=law)
    hits = [e.p_hat * e.replications for e in ests]
    ratios = np.array([e.p_hat * math.exp(2 * c * u)
                       for u, e in zip(defaults.T2_SWEEP, ests)])
    rel_se = np.array([e.stderr / e.p_hat for e in ests])
    pairwise_ok = True
    for i in range(len(ratios)):
        for j in range(i + 1, len(ratios)):
            gap = abs(ratios[i] / ratios[j] - 1.0)
            tol = defaults.T2_PAIRWISE_SIGMAS * math.hypot(rel_se[i], rel_se[j])
            pairwise_ok = pairwise_ok and gap <= tol
    weights = 1.0 / (ratios * rel_se) ** 2
    pooled = float(np.sum(weights * ratios) / np.sum(weights))
    sub = estimate_subordinated(
        law.scaled(2 * c * c), defaults.subordinated_window(defaults.T2_SUB_REPS),
        defaults.T2_SUB_REPS, seed=derived_seed(SEED, "t2-sub"))
    match = abs(pooled / min(sub.value, 1.0) - 1.0)
    rows = [ResultRecord(
        kind="compare_ratio", h=0.5, c=c, u=u, law=str(law), p_hat=e.p_hat,
        stderr=e.stderr, ci_lo=e.ci95[0], ci_hi=e.ci95[1],
        asympt_value=min(sub.value, 1.0) * math.exp(-2 * c * u),
        ratio=e.p_hat / (min(sub.value, 1.0) * math.exp(-2 * c * u)),
        log_asympt=math.log(min(sub.value, 1.0)) - 2 * c * u,
        horizon=e.horizon, reps=e.replications, seed=e.seed)
        for u, e in zip(defaults.T2_SWEEP, ests)]
    _dump("compare_h05.csv", rows)
    ok = (min(hits) >= defaults.T2_MIN_HITS and pairwise_ok
          and match <= defaults.T2_POOLED_RTOL)
    assert _report(
        "brownian-ratio-stability", ok,
        f"ratios={np.round(ratios, 4).tolist()} hits_min={min(hits):.0f} "
        f"pooled={pooled:.4f} constant={sub.value:.4f} match={match:.1%}",
    )


# ---------------------------------------------------------------------------
# 8. short-range regime: ratio against the mean-spaced grid
# ---------------------------------------------------------------------------

def test_short_range_ratio():
    spec = ExperimentSpec(
        kind="compare_ratio", h=0.25, c=1.0, sweep=defaults.R31_SWEEP,
        law=parse_law("exp:1"), reps=defaults.R31_REPS,
        seed=derived_seed(SEED, "r31"),
    )
    records = run_compare_ratio(spec)
    _dump("compare_h025.csv", records)
    last = records[-1]
    lo, hi = defaults.R31_RANGE
    ok = last.p_hat >= defaults.R31_MIN_PHAT and lo <= last.ratio <= hi
    assert _report(
        "short-range-ratio", ok,
        f"u={last.u} p_hat={last.p_hat:.2e} ratio={last.ratio:.3f} in [{lo}, {hi}]",
    )


# ---------------------------------------------------------------------------
# 9. long-range regime: ratio against the continuous proxy
# ---------------------------------------------------------------------------

def test_long_range_ratio():
    spec = ExperimentSpec(
        kind="compare_ratio", h=defaults.R1H_HURST, c=1.0,
        sweep=defaults.R1H_SWEEP, law=parse_law("exp:1"),
        reps=defaults.R1H_REPS, eta=defaults.R1H_ETA,
        seed=derived_seed(SEED, "r1h"),
    )
    records = run_compare_ratio(spec)
    _dump("compare_h075.csv", records)
    ratios = [r.ratio for r in records]
    # comparator relse <= pi relse at these sizes; sqrt(2) * pi relse is a
    # conservative stand-in for the combined relative stderr
    rel_se = [math.sqrt(2.0) * r.stderr / r.p_hat for r in records]
    lo, hi = defaults.R1H_RANGE
    slack = [defaults.R1H_SIGMAS * r * s for r, s in zip(ratios, rel_se)]
    in_range = all(lo - sl <= r <= hi + sl for r, sl in zip(ratios, slack))
    nondecreasing = all(b >= a for a, b in zip(ratios, ratios[1:]))
    ok = in_range and nondecreasing
    assert _report(
        "long-range-ratio", ok,
        f"ratios={np.round(ratios, 4).tolist()} range=[{lo}, {hi}] "
        f"nondecreasing={nondecreasing}",
    )


# ---------------------------------------------------------------------------
# 10. infinite-mean sandwich trends
# ---------------------------------------------------------------------------

def _sandwich_trend(reps: int):
    spec = ExperimentSpec(
        kind="prop2_sandwich", h=defaults.P2_HURST, c=1.0,
        sweep=defaults.P2_SWEEP, law=parse_law(defaults.P2_LAW), reps=reps,
        seed=derived_seed(SEED, f"p2-{reps}"),
    )
    records = run_prop2_sandwich(spec)
    lower = [r for r in records if r.kind == "prop2_lower"]
    upper = [r for r in records if r.kind == "prop2_upper"]
    return records, lower, upper


def _steps_significant(rows, direction):
    """(all steps in direction, all steps significant at 4 combined se)."""
    ok_dir, ok_sig = True, True
    for a, b in zip(rows, rows[1:]):
        step = b.ratio - a.ratio
        se = math.hypot(a.ratio * a.stderr / a.p_hat, b.ratio * b.stderr / b.p_hat)
        ok_dir = ok_dir and (step * direction > 0)
        ok_sig = ok_sig and abs(step) > defaults.P2_SIGMAS * se
    return ok_dir, ok_sig


def test_sandwich_trends():
    records, lower, upper = _sandwich_trend(defaults.P2_REPS)
    inc_dir, inc_sig = _steps_significant(lower, +1)
    dec_dir, dec_sig = _steps_significant(upper, -1)
    if not (inc_sig and dec_sig):
        # inconclusive at the base size: rerun once at triple replications
        records, lower, upper = _sandwich_trend(3 * defaults.P2_REPS)
        inc_dir, inc_sig = _steps_significant(lower, +1)
        dec_dir, dec_sig = _steps_significant(upper, -1)
    _dump("sandwich_pareto.csv", records)
    ok = inc_dir and inc_sig and dec_dir and dec_sig
    assert _report(
        "sandwich-trends", ok,
        f"pi/lower={[round(r.ratio, 3) for r in lower]} (increasing={inc_dir}) "
        f"pi/upper={[round(r.ratio, 3) for r in upper]} (decreasing={dec_dir})",
    )


# ---------------------------------------------------------------------------
# 11. Mills-ratio property suite
# ---------------------------------------------------------------------------

def test_mills_bounds_suite():
    x = np.asarray(qmc.Halton(d=1, seed=1).random(defaults.MILLS_POINTS)).ravel()
    x = np.clip(x * defaults.MILLS_XMAX, 1e-12, defaults.MILLS_XMAX)
    value = psi_survival(x)
    log_value = log_psi_survival(x)
    log_phi = -0.5 * x * x - 0.5 * math.log(2 * math.pi)
    upper = np.exp(log_phi) / x
    lower = (1 - 1 / x**2) * upper
    representable = value > 0.0
    ok = (
        bool(np.all(value <= upper * (1 + 1e-12)))
        and bool(np.all(value[representable] >= lower[representable] * (1 - 1e-12)))
        and bool(np.all(log_value <= log_phi - np.log(x)))
        and bool(np.all(log_value[x > 1] >= np.log1p(-1 / x[x > 1] ** 2)
                        + log_phi[x > 1] - np.log(x[x > 1])))
    )
    assert _report("mills-bounds", ok, f"{defaults.MILLS_POINTS} points on (0, 40]")


# ---------------------------------------------------------------------------
# 12. small-instance brute force
# ---------------------------------------------------------------------------

def _orthant_complement(barriers, times):
    t1, t2, t3 = times
    s1, s2, s3 = math.sqrt(t1), math.sqrt(t2 - t1), math.sqrt(t3 - t2)
    a1, a2, a3 = barriers

    def middle(x1):
        val, _ = quad(
            lambda x2: norm.cdf((a3 - x2) / s3) * norm.pdf((x2 - x1) / s2) / s2,
            x1 - 10 * s2, min(a2, x1 + 10 * s2), limit=200)
        return val

    val, _ = quad(lambda x1: middle(x1) * norm.pdf(x1 / s1) / s1,
                  -10 * s1, min(a1, 10 * s1), limit=200)
    return 1.0 - val


def test_brute_force_equivalence():
    model = RuinModel(h=0.5, c=1.0, u=1.0)
    est = estimate_psi_discrete(
        model, defaults.ORTHANT_DELTA, defaults.ORTHANT_REPS, horizon_factor=1.0,
        seed=derived_seed(SEED, "orthant"))
    times = tuple(defaults.ORTHANT_DELTA * k for k in (1, 2, 3))
    oracle = _orthant_complement(
        tuple(model.u + model.c * t for t in times), times)
    gap = abs(est.p_hat - oracle)
    ok = gap < defaults.ORTHANT_SIGMAS * est.stderr
    assert _report(
        "brute-force-equivalence", ok,
        f"p_hat={est.p_hat:.5f} oracle={oracle:.5f} gap={gap:.2e} "
        f"4se={defaults.ORTHANT_SIGMAS * est.stderr:.2e}",
    )
