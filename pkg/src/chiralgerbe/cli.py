"""Command-line driver: ``chiralgerbe verify <suite>`` and ``chiralgerbe cech``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cechglue import IncompatibleGluing, load_atlas, projective_atlas
from .suites import SUITES, Params, run_cech, run_suite

DEG_ENV = "CHIRALGERBE_DEG"
_SPACES = {"p1": 1, "p2": 2, "p3": 3}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def default_degree() -> int:
    raw = os.environ.get(DEG_ENV, "6")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{DEG_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chiralgerbe", description="Exact verification of chiral differential operator identities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--n", type=int, default=2, help="number of coordinates N")
    v.add_argument("--m", type=int, default=1, help="number of fermion pairs M")
    v.add_argument("--deg", type=int, default=None, help=f"truncation degree D (default ${DEG_ENV} or 6)")
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--format", choices=("text", "structured"), default="text")

    c = sub.add_parser("cech", help="discrepancies of an atlas")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--space", choices=sorted(_SPACES))
    src.add_argument("--atlas", help="JSON atlas file")
    c.add_argument("--bundle", choices=("tangent", "O(1)", "trivial"), default=None)
    c.add_argument("--format", choices=("text", "structured"), default="text")
    return p


def _emit(report, fmt: str) -> None:
    if fmt == "structured":
        sys.stdout.write(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(report.to_text())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            deg = args.deg if args.deg is not None else default_degree()
            params = Params(n=args.n, m=args.m, deg=deg, trials=args.trials, seed=args.seed)
            params.validate()
            report = run_suite(args.suite, params)
        else:
            if args.atlas:
                data = load_atlas(args.atlas)
            else:
                data = projective_atlas(_SPACES[args.space], args.bundle)
            report = run_cech(data)
    except (ValueError, OSError, KeyError) as exc:
        kind = "atlas error" if isinstance(exc, IncompatibleGluing) else "error"
        sys.stderr.write(f"chiralgerbe: {kind}: {exc}\n")
        return 2
    _emit(report, args.format)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
