"""``interferoq`` command-line entry point.

Configuration comes only from flags and JSON files; no environment variable
is read, so a command line plus its config file fully determines the output.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .commands import COMMANDS
from .config import PRESETS, resolve
from .errors import ConfigError, InterferoqError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

U64_MAX = 2**64 - 1


def _u64(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; usage errors are config errors here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog="interferoq",
        description="Sensitivity bounds and simulations for lambda-class interferometers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=[*COMMANDS, "verify"])
    parser.add_argument("--config", metavar="FILE", help="JSON config (overrides the preset)")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="embedded config to start from")
    parser.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    parser.add_argument("--seed", type=_u64, default=None, help="seed for Monte-Carlo checks")
    parser.add_argument("--threads", type=_positive_int, default=1, help="worker threads")
    parser.add_argument(
        "--plot", metavar="PATH", help="also render a matplotlib figure of the dataset"
    )
    return parser


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _run_verify(args):
    from .datasets import CurveDataset
    from .verify import DEFAULT_SEED, report, run_checks

    if args.config or args.preset or args.plot:
        raise ConfigError("verify", "verify takes no config, preset or plot")
    seed = DEFAULT_SEED if args.seed is None else args.seed
    checks = run_checks(seed=seed, threads=args.threads)
    print(report(checks))
    if args.out:
        ds = CurveDataset(
            columns=["check", "max_error", "tolerance", "passed", "crashed"],
            units={
                "check": "label",
                "max_error": "per-check (see tolerance)",
                "tolerance": "per-check",
                "passed": "flag",
                "crashed": "flag",
            },
            provenance={"command": "verify", "seed": seed},
            flag_columns=("crashed",),
        )
        for c in checks:
            crashed = c.max_error == float("inf")
            ds.add(c.name, c.max_error, c.tolerance, c.passed, crashed)
        _emit(ds.to_csv(), args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERICAL


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.seed is not None:
            raise ConfigError("seed", f"{args.command} is deterministic and takes no seed")
        config = resolve(args.command, args.preset, args.config)
        ds = COMMANDS[args.command](config, threads=args.threads)
        _emit(ds.to_csv(), args.out)
        if args.plot:
            from .plotting import render

            render(ds, args.plot)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InterferoqError, ArithmeticError, ValueError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK
