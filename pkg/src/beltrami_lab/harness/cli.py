"""Command-line entry point: ``beltrami-lab <experiment> [--config ...] [--out ...]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import BeltramiLabError, ConfigError
from .config import EXPERIMENTS, default_config, load_config
from .report import emit_report
from .suites import SUITES


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="beltrami-lab", description="Run Beltrami verification experiments.")
    ap.add_argument("experiment", choices=[*EXPERIMENTS, "all"])
    ap.add_argument("--config", type=Path, help="JSON object of config overrides")
    ap.add_argument("--out", type=Path, help="report directory (one subdirectory per experiment)")
    ap.add_argument("--seed", type=int, help="random seed (nonnegative)")
    ap.add_argument("--grid", type=int, help="grid size n (power of two)")
    ap.add_argument("--parallel", action="store_true", default=None, help="run family members on a thread pool")
    ap.add_argument("-q", "--quiet", action="store_true", help="print only the summary line per experiment")
    return ap


def _config(name: str, args):
    over = dict(seed=args.seed, n=args.grid, parallel=args.parallel,
                out=str(args.out / name) if args.out else None)
    if args.config:
        return load_config(args.config, name, **over)
    return default_config(name, **over)


def run(name: str, args, stream=None) -> bool:
    stream = stream or sys.stdout
    cfg = _config(name, args)
    report = SUITES[name](cfg)
    if cfg.out:
        emit_report(report, cfg.out)
    if not args.quiet:
        for check in report.checks:
            print(("  " if not check.acceptance else "") + check.line(), file=stream)
    print(f"{name}: {'PASS' if report.passed else 'FAIL'}", file=stream)
    return report.passed


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    names = EXPERIMENTS if args.experiment == "all" else (args.experiment,)
    ok = True
    for name in names:
        try:
            ok &= run(name, args)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        except BeltramiLabError as exc:
            print(f"{name}: aborted: {type(exc).__name__}: {exc}", file=sys.stderr)
            ok = False
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
