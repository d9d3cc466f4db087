"""Command-line entry point: run experiments, list the registry, check goldens."""

from __future__ import annotations

import argparse
import sys

from .harness import (REGISTRY, ConfigError, check_goldens, emit_csv,
                      emit_plotdata, parse_config, registry_ids,
                      run_experiment, write_goldens)
from .stepping import NumericalError


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors (exit 1), not numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="sobspec",
                     description="Spectral solvers for pseudo-parabolic problems: "
                                 "reproducible experiment runner.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment named by a TOML config")
    p_run.add_argument("config", help="path to the configuration file")
    p_run.add_argument("-o", "--output", default=None,
                       help="output CSV path (default: from config, else <experiment>.csv)")

    sub.add_parser("list", help="list registry experiment ids")

    p_gold = sub.add_parser("goldens", help="write or check golden reference outputs")
    p_gold.add_argument("--check", action="store_true",
                        help="compare fresh runs against stored files")
    p_gold.add_argument("--dir", default="goldens", help="golden file directory")
    return parser


def _cmd_run(args):
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    config = parse_config(text)
    result = run_experiment(config)
    path = args.output or config.output or f"{config.experiment}.csv"
    if result.kind == "profiles":
        rows = emit_plotdata(result, path)
    else:
        rows = emit_csv(result, path)
    print(f"wrote {path} ({rows} rows)")
    return 0


def _cmd_list(_args):
    width = max(len(i) for i in registry_ids())
    for exp_id in registry_ids():
        print(f"{exp_id:<{width}}  {REGISTRY[exp_id].description}")
    return 0


def _cmd_goldens(args):
    if args.check:
        mismatches = check_goldens(args.dir)
        if mismatches:
            for m in mismatches:
                print(f"golden mismatch: {m}", file=sys.stderr)
            return 1
        print(f"goldens match ({args.dir})")
        return 0
    write_goldens(args.dir)
    print(f"wrote goldens to {args.dir}")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list(args)
        return _cmd_goldens(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
