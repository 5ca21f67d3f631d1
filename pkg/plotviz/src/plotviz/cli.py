"""Command line wrapper around render()."""

import argparse
import sys

from .core import PlotSpec, PlotDataError, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plotviz",
        description="Render a sweep CSV (a t column plus value columns) "
                    "into a line figure, one curve per column.",
    )
    parser.add_argument("input", help="CSV with a t column and value columns")
    parser.add_argument("--out", required=True,
                        help="output image; format from extension (.png, .svg)")
    parser.add_argument("--title", default="", help="figure title")
    parser.add_argument("--xlabel", default="t")
    parser.add_argument("--ylabel", default="exponent")
    parser.add_argument("--dashed", default="limit",
                        help="column drawn dashed when present (default: limit)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        input_csv=args.input,
        output=args.out,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        dashed_column=args.dashed,
    )
    try:
        out = render(spec)
    except (PlotDataError, OSError, ValueError) as exc:
        print(f"plotviz: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
