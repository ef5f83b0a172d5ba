"""Command line entry point: ``polyfock <experiment> --config PATH``."""
import argparse
import os
import sys

import yaml
from pydantic import ValidationError

from ._parallel import THREADS_ENV, default_threads
from .config import EXPERIMENTS, load_config
from .experiments import run, write_report
from .symbols import SymbolExpr, SymbolParseError, parse_symbol

__all__ = ["main", "parse_symbol", "SymbolExpr"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyfock",
        description="Run Toeplitz / Berezin experiments on polyanalytic Fock spaces.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="YAML experiment file")
    parser.add_argument("--out", help="output directory (default: config output.dir/<experiment>)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    parser.add_argument("--tol", type=float, help="override the quadrature tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError, ValidationError, SymbolParseError, yaml.YAMLError) as err:
        print(f"polyfock: invalid config {args.config}: {err}", file=sys.stderr)
        return 2
    if cfg.experiment != args.experiment:
        print(
            f"polyfock: config declares experiment {cfg.experiment!r}, not {args.experiment!r}",
            file=sys.stderr,
        )
        return 2
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.tol is not None:
        updates["tolerances"] = cfg.tolerances.model_copy(update={"quadrature": args.tol})
    if updates:
        cfg = cfg.model_copy(update=updates)
    threads = args.threads if args.threads is not None else default_threads()
    report = run(cfg, threads)
    out = args.out or os.path.join(cfg.output.dir, cfg.experiment)
    write_report(report, out)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value!r} {c.relation} {c.threshold!r}")
    if report.error:
        print(f"ERROR {report.error}", file=sys.stderr)
    print(f"{report.experiment}: {report.status} ({report.wall_time:.2f} s) -> {out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
