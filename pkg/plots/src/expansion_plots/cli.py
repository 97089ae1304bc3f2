"""Command line wrapper: CSV paths in, one image out."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import f1_curve_figure, query_scatter_figure, save_figure
from .schema import SchemaError, load_grid_csv, load_run_csv
from .truth import TRUTH_PROBLEMS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expansion-plots",
        description="Render figures from expansion-sampling CSV logs.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    curve = sub.add_parser("f1-curve", help="mean F1 curve with a band across seeds")
    curve.add_argument("inputs", nargs="+", type=Path, help="per-seed run CSVs")
    curve.add_argument("--output", "-o", type=Path, required=True)
    curve.add_argument("--title", type=str, default=None)

    scatter = sub.add_parser("query-scatter", help="query sequence for one run")
    scatter.add_argument("inputs", nargs=1, type=Path, help="one run CSV")
    scatter.add_argument("--output", "-o", type=Path, required=True)
    scatter.add_argument(
        "--problem", choices=TRUTH_PROBLEMS, default=None,
        help="shade this benchmark's true feasible region",
    )
    scatter.add_argument(
        "--grid", type=Path, default=None,
        help="prediction-grid CSV for decision-boundary contours",
    )
    scatter.add_argument("--epsilon", type=float, default=0.3)
    scatter.add_argument("--eta", type=float, default=1.3)
    scatter.add_argument("--title", type=str, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.kind == "f1-curve":
            runs = [load_run_csv(path) for path in args.inputs]
            figure = f1_curve_figure(runs, title=args.title)
        else:
            run = load_run_csv(args.inputs[0])
            grid = load_grid_csv(args.grid) if args.grid is not None else None
            figure = query_scatter_figure(
                run,
                problem=args.problem,
                grid=grid,
                epsilon=args.epsilon,
                eta=args.eta,
                title=args.title,
            )
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    args.output.parent.mkdir(parents=True, exist_ok=True)
    save_figure(figure, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
