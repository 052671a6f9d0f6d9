"""``hardy-lab`` command line entry point."""

import argparse
import sys

from .. import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import EXPERIMENTS, Context, run_experiment

SUBCOMMANDS = (*EXPERIMENTS, "all")


def build_parser():
    p = argparse.ArgumentParser(
        prog="hardy-lab",
        description="Numerical verification of weighted Hardy space inequalities.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="INI-style config file (defaults when omitted)")
    p.add_argument("--out", required=True, help="directory for JSON and CSV reports")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--grid", type=int, help="override the circle grid size N")
    p.add_argument("--kmax", type=int, help="override the disk-scan depth")
    return p


def main(argv=None):
    """Run the requested experiments.  Exit code 0 iff every asserted invariant passed."""
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        cfg = cfg.with_overrides(args.seed, args.grid, args.kmax)
    except ConfigError as exc:
        print(f"hardy-lab: config error: {exc}", file=sys.stderr)
        return 2
    names = list(EXPERIMENTS) if args.subcommand == "all" else [args.subcommand]
    ctx = Context(cfg)
    ok = True
    for name in names:
        rep = run_experiment(name, cfg, ctx)
        rep.write(args.out)
        fails = rep.failures()
        n_checks = sum(len(r.checks) for r in rep.records)
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {name}: {n_checks} checks, {len(fails)} failed")
        for rec, check in fails:
            print(f"  failed: {rec} / {check}")
        ok = ok and rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
