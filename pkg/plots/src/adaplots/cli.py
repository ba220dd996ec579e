"""Command line for the batch renderer.

Exit codes: 0 success, 2 schema or configuration problem (the message
names the offending column or key).
"""

import argparse
import sys

import tomli

from adaplots.render import KINDS, FigureSpec, render

_SPEC_KEYS = {"kind", "csv", "out", "players", "coords", "logx", "title"}


def spec_from_toml(path):
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except FileNotFoundError:
        raise ValueError(f"spec file not found: {path}")
    except tomli.TOMLDecodeError as e:
        raise ValueError(f"invalid TOML in {path}: {e}")
    unknown = set(raw) - _SPEC_KEYS
    if unknown:
        raise ValueError(f"unknown spec keys: {sorted(unknown)}")
    for key in ("kind", "csv", "out"):
        if key not in raw:
            raise ValueError(f"spec is missing {key!r}")
    return FigureSpec(**raw)


def _parse_ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser():
    p = argparse.ArgumentParser(
        prog="adaplots",
        description="Render adagames CSV outputs into figures.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure")
    r.add_argument("kind", nargs="?", choices=KINDS,
                   help="figure kind (omit when using --spec)")
    r.add_argument("csv", nargs="?", help="input CSV path")
    r.add_argument("out", nargs="?", help="output image path")
    r.add_argument("--spec", help="TOML figure spec instead of positionals")
    r.add_argument("--players", help="comma-separated 1-based player numbers")
    r.add_argument("--coords", help="comma-separated 1-based coordinates")
    r.add_argument("--logx", action="store_true", help="log-scale rounds axis")
    r.add_argument("--title", help="figure title")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            if args.kind or args.csv or args.out:
                raise ValueError("--spec and positional arguments are exclusive")
            spec = spec_from_toml(args.spec)
        else:
            if not (args.kind and args.csv and args.out):
                raise ValueError("need either --spec or all of: kind csv out")
            spec = FigureSpec(kind=args.kind, csv=args.csv, out=args.out)
        if args.players:
            spec.players = _parse_ints(args.players)
        if args.coords:
            spec.coords = _parse_ints(args.coords)
        if args.logx:
            spec.logx = True
        if args.title:
            spec.title = args.title
        out = render(spec)
    except (ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
