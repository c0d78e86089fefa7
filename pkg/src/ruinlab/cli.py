"""Command-line front end.

Subcommands: ``mc``, ``asympt``, ``pickands``, ``compare``, ``sandwich``.
Each accepts either ``--config PATH`` (a flat key = value file) or inline
flags mirroring the config keys one-to-one.  Records go to ``--out`` in the
versioned CSV/JSON schema, or to stdout as CSV when no output path is given.
Errors print a machine-readable JSON report to stderr and exit non-zero.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, IOFailure, RuinLabError
from .experiments import (
    ExperimentSpec,
    parse_config_text,
    run_spec,
    spec_from_mapping,
)
from .inspection import parse_law
from .records import records_to_csv

EXIT_CODES = {"ConfigError": 2, "IOFailure": 3}

_SUBCOMMAND_KINDS = {
    "mc": ("mc_pi", "mc_psi"),
    "asympt": ("asympt",),
    "pickands": ("pickands",),
    "compare": ("compare_ratio",),
    "sandwich": ("prop2_sandwich",),
}


def error_report(name: str, message: str, field_name=None) -> None:
    payload = {"error": name, "message": message}
    if field_name is not None:
        payload["field"] = field_name
    print(json.dumps(payload), file=sys.stderr)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--h", type=float, help="Hurst parameter in (0, 1)")
    sub.add_argument("--c", type=float, help="drift rate")
    sub.add_argument("--u", action="append", type=float,
                     help="threshold; repeat for a sweep")
    sub.add_argument("--law", help="jump law, e.g. exp:1.0 or pareto:1:0.8")
    sub.add_argument("--delta", type=float, help="grid step / discrete constant step")
    sub.add_argument("--eta", type=float, help="fine grid step (continuous proxy)")
    sub.add_argument("--reps", type=int, help="Monte Carlo replications")
    sub.add_argument("--seed", type=int, help="64-bit master seed")
    sub.add_argument("--horizon-factor", type=float, dest="horizon_factor")
    sub.add_argument("--s", type=float, help="truncation window for constants")
    sub.add_argument("--mu", type=float, help="jump mean override")
    sub.add_argument("--pickands-classical", type=float, dest="pickands_classical")
    sub.add_argument("--pickands-discrete", type=float, dest="pickands_discrete")
    sub.add_argument("--pickands-subordinated", type=float, dest="pickands_subordinated")
    sub.add_argument("--out", help="output path")
    sub.add_argument("--format", choices=("csv", "json"), dest="fmt")
    sub.add_argument("--force", action="store_true", default=None,
                     help="overwrite an existing output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ruinlab",
        description="Monte Carlo and asymptotics for inspected fBm ruin probabilities",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("mc", "estimate one ruin probability over a threshold sweep"),
        ("asympt", "evaluate the closed-form asymptotics"),
        ("pickands", "estimate a Pickands-type constant (reports S and S/2)"),
        ("compare", "inspected ruin against the regime comparator"),
        ("sandwich", "inspected ruin against the infinite-mean envelopes"),
    ):
        _add_common_flags(subs.add_parser(name, help=help_text))
    return parser


def _infer_kind(command: str, mapping: dict[str, str]) -> str:
    if command != "mc":
        return _SUBCOMMAND_KINDS[command][0]
    has_law = "law" in mapping
    has_grid = "delta" in mapping or "eta" in mapping
    if has_law == has_grid:
        raise ConfigError("law", "mc needs either a jump law or a grid step")
    return "mc_pi" if has_law else "mc_psi"


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                mapping = parse_config_text(fh.read())
        except OSError as exc:
            raise IOFailure(str(exc)) from None
        if mapping.get("kind") not in _SUBCOMMAND_KINDS[args.command]:
            raise ConfigError(
                "kind",
                f"config kind {mapping.get('kind')!r} does not belong to "
                f"subcommand {args.command!r}",
            )
        return spec_from_mapping(mapping)
    mapping = {}
    for key in ("h", "c", "delta", "eta", "reps", "seed", "horizon_factor", "s",
                "mu", "pickands_classical", "pickands_discrete",
                "pickands_subordinated"):
        value = getattr(args, key)
        if value is not None:
            mapping[key] = repr(value)
    if args.u:
        mapping["u"] = ",".join(repr(v) for v in args.u)
    if args.law is not None:
        parse_law(args.law)  # validate before handing the string over
        mapping["law"] = args.law
    if args.out is not None:
        mapping["out"] = args.out
    if args.fmt is not None:
        mapping["format"] = args.fmt
    if args.force:
        mapping["force"] = "true"
    mapping["kind"] = _infer_kind(args.command, mapping)
    return spec_from_mapping(mapping)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        records = run_spec(spec)
    except RuinLabError as exc:
        name = type(exc).__name__
        error_report(name, str(exc), getattr(exc, "field", None))
        return EXIT_CODES.get(name, 4)
    if spec.output_path is None:
        sys.stdout.write(records_to_csv(records))
    return 0


if __name__ == "__main__":
    sys.exit(main())
