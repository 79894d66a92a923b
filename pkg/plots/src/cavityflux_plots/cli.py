"""Command line entry point: plot_sweep."""

from __future__ import annotations

import argparse
import sys

from .model import KINDS, PlotSpec, SchemaError
from .figures import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot_sweep",
        description="Render sweep/heatmap CSV files into figures.")
    parser.add_argument("--csv", nargs="+", required=True,
                        help="input CSV file(s); for heatmap, the matrix CSV")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--method", nargs="*", default=None,
                        help="restrict to these methods (default: all present)")
    parser.add_argument("--port", nargs="*", default=None,
                        help="restrict to these ports (default: all present)")
    parser.add_argument("--scene", nargs="*", default=None,
                        help="restrict to these scenes (default: all present)")
    parser.add_argument("--reference", type=float, default=0.44,
                        help="horizontal guide level on source sweeps "
                             "(default: 0.44)")
    parser.add_argument("--no-reference", action="store_true",
                        help="suppress the horizontal guide line")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        csv_paths=args.csv,
        kind=args.kind,
        out_path=args.out,
        methods=args.method,
        ports=args.port,
        scenes=args.scene,
        reference=None if args.no_reference else args.reference,
    )
    try:
        path = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
