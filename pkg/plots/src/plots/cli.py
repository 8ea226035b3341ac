"""Command-line front end: errors, rates, runtime."""

import argparse
import sys

from .figures import plot_errors, plot_rates, runtime_table


def _cmd_errors(args) -> int:
    series = plot_errors(args.in_path, args.experiment, args.out,
                         style_path=args.style)
    print(f"{len(series)} series -> {args.out}")
    return 0


def _cmd_rates(args) -> int:
    slopes = plot_rates(args.in_path, args.out, style_path=args.style)
    print(f"{len(slopes)} slopes -> {args.out}")
    return 0


def _cmd_runtime(args) -> int:
    rows = runtime_table(args.in_path, args.out)
    print(f"{len(rows)} rows -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plots",
                                description="figures from benchmark results CSVs")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("errors", help="error curves with std bands for one experiment")
    q.add_argument("--in", dest="in_path", required=True)
    q.add_argument("--out", required=True, help="output image (.svg or .png)")
    q.add_argument("--experiment", required=True)
    q.add_argument("--style", default=None, help="override the committed style sheet")
    q.set_defaults(func=_cmd_errors)

    q = sub.add_parser("rates", help="log-log rate plot with fitted slopes")
    q.add_argument("--in", dest="in_path", required=True)
    q.add_argument("--out", required=True, help="output image (.svg or .png)")
    q.add_argument("--style", default=None, help="override the committed style sheet")
    q.set_defaults(func=_cmd_rates)

    q = sub.add_parser("runtime", help="mean wall time table per experiment and method")
    q.add_argument("--in", dest="in_path", required=True)
    q.add_argument("--out", required=True, help="output table (.csv or .md)")
    q.set_defaults(func=_cmd_runtime)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
