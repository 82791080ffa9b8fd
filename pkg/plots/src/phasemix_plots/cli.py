"""phasemix-plot: render sweep CSVs to figure files."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureError, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasemix-plot",
        description="render a sweep CSV into a figure (png or svg)",
    )
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--csv", required=True, help="sweep CSV produced by the optimizer")
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = render(FigureSpec(csv=args.csv, kind=args.kind, out=args.out))
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"rendered {args.kind} from {result.n_rows} rows -> {result.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
