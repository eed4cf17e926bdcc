"""Command-line front end: ``plots <kind> <input> -o <output>``.

Kinds: ``invariants`` and ``drift`` take an invariants CSV, ``order``
takes an order-table CSV, ``waterfall`` takes a snapshot directory.
Schema mismatches exit nonzero with a message naming the missing column
or offending file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .readers import SchemaError, read_invariants, read_order_table, read_snapshots
from .render import DPI, plot_drift, plot_invariants, plot_orders, plot_waterfall

KINDS = ("invariants", "drift", "order", "waterfall")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render figures from cnls solver artifacts",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input", type=Path, help="CSV file or snapshot directory")
    parser.add_argument("-o", "--output", type=Path, required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=DPI)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.kind == "invariants":
            plot_invariants(read_invariants(args.input), args.output, dpi=args.dpi)
        elif args.kind == "drift":
            plot_drift(read_invariants(args.input), args.output, dpi=args.dpi)
        elif args.kind == "order":
            slopes = plot_orders(read_order_table(args.input), args.output, dpi=args.dpi)
            for col, slope in slopes.items():
                print(f"{col}: fitted slope {slope:.3f}")
        elif args.kind == "waterfall":
            plot_waterfall(read_snapshots(args.input), args.output, dpi=args.dpi)
    except (SchemaError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
