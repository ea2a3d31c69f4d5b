"""Command line wrapper: ``wrplots plot --csv ... --group-by ... --out ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .render import FigureSpec, render


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="wrplots", description="convergence figures from solver CSVs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="semilog error-vs-iteration figure")
    p.add_argument("--csv", nargs="+", required=True, type=Path, help="input CSV file(s)")
    p.add_argument("--group-by", required=True, help="column defining the series (theta | T | method)")
    p.add_argument("--out", required=True, type=Path, help="output image path")
    p.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    spec = FigureSpec(csv_paths=args.csv, group_by=args.group_by, out_path=args.out, title=args.title)
    try:
        render(spec)
    except (OSError, ValueError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
