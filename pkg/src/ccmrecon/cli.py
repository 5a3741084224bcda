"""Command line entry point: ``ccmrecon run|sweep|selftest``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .harness.config import ConfigError, load_config
from .harness.selftest import run_selftest
from .harness.sweep import default_workers, run_sweep, write_csv

log = logging.getLogger("ccmrecon")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccmrecon", description="Covariance reconstruction Monte Carlo runner")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed (unsigned 64-bit)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("run", "single scenario"), ("sweep", "sweep the variable named in the config")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", required=True, help="JSON scenario file")
        s.add_argument("--out", required=True, help="CSV output path")
        s.add_argument("--workers", type=int, default=argparse.SUPPRESS)
        s.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub.add_parser("selftest", help="run the built-in invariant checks")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    if args.command == "selftest":
        return 0 if run_selftest() else 1

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.command == "run":
            cfg = replace(cfg, sweep=None)
        elif cfg.sweep is None:
            raise ConfigError("sweep needs a 'sweep' variable in the config (snr, spread or nu)")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    workers = args.workers if args.workers is not None else default_workers()
    if workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    log.info("running %d trial(s) per point with %d worker(s)", cfg.trials, workers)
    points = run_sweep(cfg, workers)
    try:
        write_csv(points, cfg.sweep, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
