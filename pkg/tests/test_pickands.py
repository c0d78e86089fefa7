"""Pickands-constant estimators: examples, couplings, integral reduction."""

import math

import numpy as np
import pytest

from ruinlab.errors import GridTooShort
from ruinlab.gaussian_paths import _iter_grid_paths
from ruinlab.inspection import Deterministic, Exponential, Gamma, Uniform, parse_law
from ruinlab.pickands import (
    SQRT2,
    estimate_classical,
    estimate_subordinated,
    grid_steps,
    integral_form_check,
    martingale_check,
)


def test_grid_steps_handles_float_boundaries():
    assert grid_steps(2.0, 0.5) == 4
    assert grid_steps(1.0, 0.1) == 10
    assert grid_steps(100.0, 0.01) == 10_000
    assert grid_steps(0.4, 0.5) == 0


def test_estimator_deterministic_in_seed():
    a = estimate_classical(0.5, 0.5, 10.0, 500, seed=3)
    b = estimate_classical(0.5, 0.5, 10.0, 500, seed=3)
    assert a == b
    c = estimate_subordinated(Exponential(1.0), 10.0, 500, seed=3)
    d = estimate_subordinated(Exponential(1.0), 10.0, 500, seed=3)
    assert c == d


def test_nested_grids_sup_monotone_on_shared_paths():
    # sup over delta Z is a sup over a subset of the (delta/2) Z points of
    # the same path, so per-path statistics are ordered; shared seed means
    # shared fine path here.
    h, eta, s, reps = 0.5, 0.125, 8.0, 400
    n = grid_steps(s, eta)
    t_pow = np.arange(1, n + 1) * eta
    sup_fine = np.empty(reps)
    sup_mid = np.empty(reps)
    sup_coarse = np.empty(reps)
    for start, paths in _iter_grid_paths(h, eta, n, reps, seed=12):
        w = SQRT2 * paths - t_pow
        rows = paths.shape[0]
        sup_fine[start:start + rows] = np.maximum(w.max(axis=1), 0.0)
        sup_mid[start:start + rows] = np.maximum(w[:, 1::2].max(axis=1), 0.0)
        sup_coarse[start:start + rows] = np.maximum(w[:, 3::4].max(axis=1), 0.0)
    assert np.all(sup_coarse <= sup_mid + 1e-15)
    assert np.all(sup_mid <= sup_fine + 1e-15)


def test_window_extension_never_decreases_sup():
    # sup over [0, S] is a sup over a subset of the [0, 2S] grid points of
    # the same path.
    h, step, reps = 0.5, 0.25, 300
    s = 6.0
    n = grid_steps(2 * s, step)
    k = grid_steps(s, step)
    t_pow = np.arange(1, n + 1) * step
    for start, paths in _iter_grid_paths(h, step, n, reps, seed=13):
        w = SQRT2 * paths - t_pow
        short = np.maximum(w[:, :k].max(axis=1), 0.0)
        full = np.maximum(w.max(axis=1), 0.0)
        assert np.all(short <= full + 1e-15)


def test_classical_requires_eta_when_continuous():
    with pytest.raises(ValueError):
        estimate_classical(0.5, 0.0, 10.0, 100, eta=0.0)


def test_cauchy_consistency_in_window():
    # stated long-window pair; agreement is within the (large, honestly
    # reported) replication noise of the Pareto-tailed sup statistic
    a = estimate_classical(0.5, 1.0, 50.0, 10_000, seed=0)
    b = estimate_classical(0.5, 1.0, 100.0, 10_000, seed=1000)
    combined = math.hypot(a.stderr, b.stderr)
    assert abs(a.value - b.value) <= 4 * combined


def test_subordinated_bounded_by_one():
    for i, law in enumerate(
        [Exponential(1.0), Gamma(2.0, 0.5), Uniform(0.2, 0.8), Deterministic(0.5)]
    ):
        est = estimate_subordinated(law, 10.0, 5_000, seed=200 + i)
        assert est.value <= 1.0 + 4 * est.stderr


def test_subordinated_deterministic_matches_classical():
    # constant jumps reduce the subordinated constant to the discrete one
    # (unit scaling): same functional, independent estimators.
    sub = estimate_subordinated(Deterministic(0.7), 10.0, 40_000, seed=5)
    cls = estimate_classical(0.5, 0.7, 10.0, 40_000, seed=6)
    combined = math.hypot(sub.stderr, cls.stderr)
    assert abs(sub.value - cls.value) <= 4 * combined


def test_martingale_check_examples():
    for i, law in enumerate(
        [Exponential(1.0), Gamma(2.0, 0.5), Uniform(0.2, 0.8), Deterministic(0.5)]
    ):
        mean, se = martingale_check(law, 100_000, seed=300 + i)
        assert abs(mean - 1.0) <= 4 * se


def test_integral_form_check_agrees():
    x = np.linspace(-12.0, 14.0, 261)
    out = integral_form_check(Exponential(1.0), 20.0, 50_000, x, seed=7)
    combined = math.hypot(out.direct_stderr, out.reduced_stderr)
    # quadrature allowance: trapezoid error plus the cut left tail e^{-12}/S
    assert abs(out.direct - out.reduced) <= 4 * combined + 5e-3


def test_integral_form_survival_properties():
    from ruinlab.pickands import _subordinated_maxes, empirical_survival

    maxes = _subordinated_maxes(Exponential(1.0), 20.0, 20_000, seed=8)
    x = np.linspace(-12.0, 14.0, 53)
    surv = empirical_survival(maxes, x)
    assert np.all(np.diff(surv) <= 0)  # nonincreasing in x
    assert surv[0] == 1.0  # origin inclusion: max >= 0 > very negative x


def test_integral_form_grid_too_short():
    x = np.linspace(-5.0, 2.0, 29)
    with pytest.raises(GridTooShort):
        integral_form_check(Exponential(1.0), 20.0, 20_000, x, seed=9)


def test_parse_law_roundtrip_for_acceptance_laws():
    for text in ("exp:1", "gamma:2:0.5", "unif:0.2:0.8", "det:0.5"):
        parse_law(text)
