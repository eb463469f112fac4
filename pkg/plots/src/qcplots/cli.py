"""Command-line entry point: ``plots <kind> --input rows.csv --output fig.svg``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import PlotError
from .figures import KINDS, FigureSpec, render


def _group_list(text: str) -> tuple[str, ...]:
    parts = tuple(part.strip() for part in text.split(",") if part.strip())
    if not parts:
        raise argparse.ArgumentTypeError("expected comma-separated column names")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render a figure from a qcsens row CSV."
    )
    parser.add_argument("kind", choices=KINDS, help="which figure family to draw")
    parser.add_argument("--input", type=Path, required=True, help="row CSV to read")
    parser.add_argument("--output", type=Path, required=True, help="image file to write")
    parser.add_argument(
        "--group-by",
        type=_group_list,
        metavar="COL,COL",
        help="draw one line per distinct value combination of these columns",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=ns.kind, input_path=ns.input, output_path=ns.output, group_by=ns.group_by
    )
    try:
        render(spec)
    except (PlotError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
