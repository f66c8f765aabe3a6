"""``stgeo <experiment> --config FILE [--seed N] [--out DIR]``."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import EXPERIMENTS, ConfigError, ExperimentConfig, parse_config, validate
from .filterfn import FormalismBreakdownError
from .synthesis import UnrepresentableGateError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stgeo",
        description="Singlet-triplet geometric gate experiments.",
    )
    p.add_argument("experiment", nargs="?", help="experiment to run (see --list)")
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--list", action="store_true", help="list experiments and exit")
    p.add_argument("--validate", action="store_true", help="check the configuration only")
    return p


def load_config(args) -> ExperimentConfig:
    text = ""
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    cfg = parse_config(text, args.experiment)
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.out is not None:
        updates["output_dir"] = args.out
    return dataclasses.replace(cfg, **updates)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        for name in EXPERIMENTS:
            print(name)
        return EXIT_OK
    if not args.experiment and not args.config:
        print("stgeo: an experiment name or --config is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate(cfg)
    if args.validate:
        for msg in problems:
            print(msg)
        if not problems:
            print("ok")
        return EXIT_CONFIG if problems else EXIT_OK
    if problems:
        for msg in problems:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG

    # heavy imports only once the config is known to be good
    from .experiments import run, write_report

    try:
        rep = run(cfg)
    except (FormalismBreakdownError, UnrepresentableGateError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        target = write_report(rep, cfg.output_dir)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {target}")
    for k, v in rep.summary.items():
        print(f"  {k} = {v}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
