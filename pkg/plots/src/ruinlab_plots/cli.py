"""Command line: ruinlab-plots render --in CSV --kind K --out IMG [--logy]."""

from __future__ import annotations

import argparse
import json
import sys

from .figures import KINDS, FigureSpec, render_spec
from .reader import EmptyInput, SchemaMismatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ruinlab-plots", description="figures from ruinlab-v1 result CSVs")
    subs = parser.add_subparsers(dest="command", required=True)
    r = subs.add_parser("render", help="render one figure from one CSV")
    r.add_argument("--in", dest="input", required=True, help="input CSV (v1 schema)")
    r.add_argument("--kind", required=True, choices=KINDS)
    r.add_argument("--out", required=True, help="output image path")
    r.add_argument("--logy", action="store_true", help="logarithmic y axis")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render_spec(FigureSpec(input_csv=args.input, kind=args.kind,
                               output_path=args.out, logy=args.logy))
    except (SchemaMismatch, EmptyInput, OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return {"SchemaMismatch": 2, "EmptyInput": 3}.get(type(exc).__name__, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
