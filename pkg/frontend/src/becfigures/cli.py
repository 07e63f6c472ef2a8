"""Command line: render becscatter tables into figures.

    becfigures render --layout fig2 --out fig2.png table1.csv table2.csv
"""

from __future__ import annotations

import argparse
import sys

from .figures import LAYOUTS, FigureSpec, render

EXIT_OK = 0
EXIT_INVALID = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="becfigures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render tables into a figure")
    p.add_argument("inputs", nargs="+", help="CSV or JSON tables")
    p.add_argument("--layout", required=True, choices=LAYOUTS)
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--format", choices=("png", "svg"),
                   help="image format (default: from --out suffix)")
    p.add_argument("--log-reflection", choices=("on", "off"),
                   help="override the layout's reflection-axis scale")
    p.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    log_r = None if args.log_reflection is None else args.log_reflection == "on"
    try:
        spec = FigureSpec(inputs=tuple(args.inputs), layout=args.layout,
                          out=args.out, image_format=args.format,
                          log_reflection=log_r, dpi=args.dpi)
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
