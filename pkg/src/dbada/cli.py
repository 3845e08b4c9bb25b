"""Command line entry point: ``dbada --config cfg.toml --out results/``."""
from __future__ import annotations

import argparse
import logging
import sys
import time

from .allocation import ConvergenceError
from .config import ConfigError, load_config

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _csv_list(text):
    return [t for t in (s.strip() for s in text.split(",")) if t]


def build_parser():
    p = argparse.ArgumentParser(
        prog="dbada",
        description="Run the HetNet activation / bandwidth-allocation campaign.")
    p.add_argument("--config", help="TOML configuration file (defaults if omitted)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--drops", type=int, help="drops per hour")
    p.add_argument("--beta", type=_csv_list, help="comma-separated energy prices for DBADA")
    p.add_argument("--scenarios", type=_csv_list,
                   help="comma-separated scenarios, e.g. MO/PFS,PA50/EA,DBADA")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figures")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _overrides(args):
    out = {}
    if args.seed is not None:
        out["seed"] = args.seed
    if args.drops is not None:
        out["drops"] = args.drops
    if args.workers is not None:
        out["workers"] = args.workers
    if args.scenarios is not None:
        out["scenarios.include"] = args.scenarios
    if args.beta is not None:
        try:
            out["scenarios.beta"] = [float(b) for b in args.beta]
        except ValueError:
            raise ConfigError(f"--beta: not a list of numbers: {args.beta}") from None
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .campaign import run_campaign, write_outputs

    t0 = time.perf_counter()
    try:
        result = run_campaign(config)
        paths = write_outputs(result.records, result.summaries, result.improvements, args.out)
        if not args.no_figures:
            from .report import render_figures
            paths += render_figures(result.records, result.summaries, args.out)
    except (ConvergenceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{len(result.records)} records in {time.perf_counter() - t0:.1f} s")
    for s in result.summaries:
        print(f"  {s.scenario:<16} power {s.avg_power_w:8.1f} W  "
              f"p10 {s.avg_p10_rate / 1e6:7.2f}  median {s.avg_median_rate / 1e6:7.2f}  "
              f"sum {s.avg_sum_rate / 1e6:8.1f} Mbit/s")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
