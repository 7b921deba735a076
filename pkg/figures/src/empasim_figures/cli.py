"""Batch figure rendering: ``empasim-figures render <kind> <dataset> <out-image>``."""

from __future__ import annotations

import argparse
import sys

from .datasets import SchemaError
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="empasim-figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from an exported dataset")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("dataset", help="CSV dataset, or JSONL trace for gantt")
    p.add_argument("out_image", help="output image path (png, svg, pdf)")
    p.add_argument("--log-x", action="store_true", default=None)
    p.add_argument("--log-y", action="store_true", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(args.kind, args.dataset, args.out_image, args.log_x, args.log_y)
    try:
        render(spec)
    except SchemaError as exc:
        print(f"error[schema]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
