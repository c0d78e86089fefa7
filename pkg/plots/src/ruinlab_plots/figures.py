"""The three figure kinds, rendered with a fixed deterministic style."""

from __future__ import annotations

import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import SchemaMismatch, read_csv

plt.rcParams.update({
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.family": "DejaVu Sans",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "ruinlab-plots",
})

KINDS = ("ratio_curve", "pickands_convergence", "sandwich")


def _sorted_by(records, key):
    rows = [r for r in records if r.get(key) is not None]
    return sorted(rows, key=lambda r: r[key])


def ratio_curve(records) -> plt.Figure:
    """Ratio of the estimate to its comparator along the threshold sweep,
    with the Wilson interval mapped through the comparator."""
    rows = _sorted_by(records, "u")
    rows = [r for r in rows if r.get("ratio") is not None]
    if not rows:
        raise SchemaMismatch("ratio_curve needs rows with u and ratio values")
    u = np.array([r["u"] for r in rows])
    ratio = np.array([r["ratio"] for r in rows])
    fig, ax = plt.subplots()
    ax.plot(u, ratio, marker="o", color="#1f5fa8", label="estimate / comparator")
    y_all = [ratio]
    if all(r.get("ci_lo") is not None and r.get("asympt_value") for r in rows):
        lo = np.array([r["ci_lo"] / r["asympt_value"] for r in rows])
        hi = np.array([r["ci_hi"] / r["asympt_value"] for r in rows])
        ax.fill_between(u, lo, hi, alpha=0.25, color="#1f5fa8", label="95% interval")
        y_all += [lo, hi]
    ax.axhline(1.0, color="0.4", lw=0.8, ls="--")
    span = np.concatenate(y_all + [np.array([1.0])])
    pad = 0.05 * (span.max() - span.min() or 1.0)
    ax.set_ylim(span.min() - pad, span.max() + pad)
    ax.set_xlabel("threshold u")
    ax.set_ylabel("ratio")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def pickands_convergence(records) -> plt.Figure:
    """Constant estimates against the truncation window, one series per kind."""
    rows = _sorted_by(records, "horizon")
    rows = [r for r in rows if r.get("p_hat") is not None]
    if not rows:
        raise SchemaMismatch("pickands_convergence needs horizon and p_hat values")
    fig, ax = plt.subplots()
    series: dict[tuple, list] = {}
    for r in rows:
        series.setdefault((r["kind"], r.get("law"), r.get("delta")), []).append(r)
    for (kind, law, delta), group in sorted(series.items(), key=str):
        s = np.array([g["horizon"] for g in group])
        v = np.array([g["p_hat"] for g in group])
        err = np.array([4 * (g["stderr"] or 0.0) for g in group])
        label = kind + (f" {law}" if law else "") + (f" d={delta:g}" if delta else "")
        if len(group) == 1:
            print("warning: single window value, drawing a marker only",
                  file=sys.stderr)
            ax.errorbar(s, v, yerr=err, marker="s", ls="none", capsize=3, label=label)
        else:
            ax.errorbar(s, v, yerr=err, marker="o", capsize=3, label=label)
    ax.axhline(1.0, color="0.4", lw=0.8, ls="--")
    ax.set_xlabel("truncation window S")
    ax.set_ylabel("constant estimate")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def sandwich(records) -> plt.Figure:
    """Estimated probability between the infinite-mean envelopes."""
    rows = _sorted_by(records, "u")
    if not rows or any(r.get("asympt_value") is None or r.get("ratio") is None
                       for r in rows):
        raise SchemaMismatch("sandwich needs asympt_value and ratio on every row")
    fig, ax = plt.subplots()
    for kind, style, label in (
        ("prop2_lower", "--", "lower envelope"),
        ("prop2_upper", ":", "upper rate"),
    ):
        grp = [r for r in rows if r["kind"] == kind]
        if grp:
            u = np.array([r["u"] for r in grp])
            ax.plot(u, [r["asympt_value"] for r in grp], style, color="0.35",
                    label=label)
    seen = set()
    pi_rows = [r for r in rows if not (r["u"] in seen or seen.add(r["u"]))]
    u = np.array([r["u"] for r in pi_rows])
    p = np.array([r["p_hat"] for r in pi_rows])
    ax.plot(u, p, marker="o", color="#a83232", label="estimated probability")
    if all(r.get("ci_lo") is not None for r in pi_rows):
        ax.fill_between(u, [r["ci_lo"] for r in pi_rows],
                        [r["ci_hi"] for r in pi_rows], alpha=0.25, color="#a83232")
    ax.set_xlabel("threshold u")
    ax.set_ylabel("probability")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


RENDERERS = {
    "ratio_curve": ratio_curve,
    "pickands_convergence": pickands_convergence,
    "sandwich": sandwich,
}


def render(records, kind: str, logy: bool = False) -> plt.Figure:
    if kind not in RENDERERS:
        raise ValueError(f"unknown figure kind {kind!r}; choose from {KINDS}")
    fig = RENDERERS[kind](records)
    if logy:
        fig.axes[0].set_yscale("log")
    return fig


def save(fig: plt.Figure, path) -> None:
    """Write the figure; metadata is pinned so identical inputs give
    identical bytes (raster at fixed DPI, salted ids for SVG)."""
    kwargs = {}
    if str(path).endswith(".svg"):
        kwargs["metadata"] = {"Date": None}
    fig.savefig(path, **kwargs)
    plt.close(fig)


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSV, figure kind, output path, axis flags."""

    input_csv: str
    kind: str
    output_path: str
    logy: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def render_spec(spec: FigureSpec) -> None:
    """Read, render and write one figure as described by `spec`."""
    save(render(read_csv(spec.input_csv), spec.kind, logy=spec.logy),
         spec.output_path)
