"""Command line front end: render archived CSV runs to SVG.

Exit codes: 0 on success, 2 for bad usage or malformed/empty input
files, 1 for anything else (typically filesystem errors).  Nothing is
written unless the inputs parsed cleanly.
"""

import argparse
import sys

from .io import EmptyDataError, SchemaError
from .render import FigureSpec, plot_constants, plot_ensemble


def _axis_range(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        pair = (float(lo), float(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if not pair[0] < pair[1]:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return pair


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render wave-constant and ensemble figures from CSV archives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("constants", help="plot a constants sweep")
    con.add_argument("sweep_csv", help="constants sweep CSV")
    con.add_argument("out", help="output SVG path")
    con.add_argument(
        "--panel",
        choices=("both", "mu", "sigma2"),
        default="both",
        help="which panel(s) to draw (default: both)",
    )
    con.add_argument("--xlim", type=_axis_range, metavar="LO:HI",
                     help="clamp the alpha axis")
    con.add_argument("--ylim", type=_axis_range, metavar="LO:HI",
                     help="clamp the value axis (single panel only)")

    ens = sub.add_parser("ensemble", help="plot ensemble front trajectories")
    ens.add_argument("ensemble_csv", help="per-replicate trajectory CSV")
    ens.add_argument("stats_csv", help="summary statistics CSV")
    ens.add_argument("out", help="output SVG path")
    ens.add_argument("--xlim", type=_axis_range, metavar="LO:HI",
                     help="clamp the time axis")
    ens.add_argument("--ylim", type=_axis_range, metavar="LO:HI",
                     help="clamp the position axis (trajectory panel)")

    return parser


def _spec_from_args(args, inputs):
    return FigureSpec(
        inputs=inputs,
        out_path=args.out,
        panels=getattr(args, "panel", "both"),
        x_range=args.xlim,
        y_range=args.ylim,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "constants":
            spec = _spec_from_args(args, (args.sweep_csv,))
            summary = plot_constants(args.sweep_csv, args.out, spec=spec)
            skipped = summary["n_skipped"]
            note = f", {skipped} row(s) skipped" if skipped else ""
            print(f"wrote {args.out}: {summary['n_points']} points, "
                  f"alpha {summary['alpha_min']:g}..{summary['alpha_max']:g}"
                  f"{note}")
        else:
            spec = _spec_from_args(args, (args.ensemble_csv, args.stats_csv))
            summary = plot_ensemble(args.ensemble_csv, args.stats_csv,
                                    args.out, spec=spec)
            flagged = summary["n_flagged"]
            note = f", {flagged} flagged replicate(s) dropped" if flagged else ""
            print(f"wrote {args.out}: {summary['n_clean']} replicates on the "
                  f"{summary['clock_label']}{note}")
    except (SchemaError, EmptyDataError) as exc:
        print(f"figures: {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
