"""Command-line entry points.

Exit codes: 0 success, 1 at least one verification criterion failed,
2 configuration error, 3 numerical abort during a run.
"""

from __future__ import annotations

import argparse
import sys

from adagames import harness
from adagames.harness import FIGURES, ConfigError, NumericalAbort

EXIT_OK = 0
EXIT_CRITERION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_GAME_LINES = [
    ("bilinear", "two-player min-max theta*phi on a box (default [-4, 8]^2)"),
    ("zero_sum", "mixed extension of a seeded random matrix game on simplices"),
    ("kelly", "proportional-allocation auction on budget sets (concave utilities)"),
    ("jordan", "three-player matching pennies; no Nash convergence for no-regret play"),
]


def build_parser():
    p = argparse.ArgumentParser(
        prog="adagames",
        description="Adaptive no-regret learning experiments in continuous games.")
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one experiment from a TOML config")
    runp.add_argument("--config", required=True, help="path to a schema-1 TOML config")
    runp.add_argument("--out", help="directory for CSV output (overrides the config)")
    runp.add_argument("--horizon", type=int, help="override the configured horizon")
    runp.add_argument("--stride", type=int, help="override the logging stride")

    ver = sub.add_parser("verify", help="run verification criteria")
    ver.add_argument("--suite", help="suite name or single criterion id (default: all)")

    fig = sub.add_parser("reproduce-figure", help="re-run the experiments behind a figure")
    fig.add_argument("name", choices=FIGURES)
    fig.add_argument("--out", required=True, help="output directory for the CSVs")
    fig.add_argument("--horizon", type=int, help="shortened horizon for quick runs")

    sub.add_parser("list-games", help="list the game corpus")
    return p


def cmd_run(args):
    overrides = {}
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.stride is not None:
        overrides["stride"] = args.stride
    config = harness.config_from_toml(args.config, overrides)
    if args.out:
        config.out = args.out
    result = harness.run_experiment(config)
    if config.out:
        result.write_csvs(config.out)
        print(f"wrote trajectory/regret/rates/residuals CSVs to {config.out}")
    etas = ", ".join(f"{result.eta[i, -1]:.4f}" for i in range(result.game.players))
    print(f"{result.game.name}: T={config.horizon}, "
          f"social regret {result.socials_logged[-1]:.4f}, final rates [{etas}]")
    return EXIT_OK


def cmd_verify(args):
    reports = harness.verify(args.suite)
    for r in reports:
        print(r.line())
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} criteria passed")
    return EXIT_CRITERION if failed else EXIT_OK


def cmd_figure(args):
    results = harness.reproduce_figure(args.name, args.out, args.horizon)
    for sub, res in sorted(results.items()):
        label = f"{args.name}/{sub}" if sub else args.name
        print(f"{label}: T={res.config.horizon}, {len(res.ts)} logged rows")
    return EXIT_OK


def cmd_list(_args):
    for name, desc in _GAME_LINES:
        print(f"{name:10s} {desc}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "reproduce-figure":
            return cmd_figure(args)
        return cmd_list(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
