"""Command-line driver: ``gimqfrac-bench <command> [options]``."""
from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config, parse_config
from .runner import ExperimentError, run_experiment

TABLE_CONFIGS = {
    "table1": """
benchmark = poisson1d_hom
alpha = 0.6, 1, 1.5, 2
eps = 3, 3.5, 3.5, 3.5
resolution = 5, 9, 17, 33, 65
output = table1.csv
""",
    "table2": """
benchmark = poisson1d_sinc
alpha = 0.6, 1, 1.5, 2
eps = 1, 1, 1.5, 1.5
resolution = 5, 9, 17, 33
output = table2.csv
""",
    "table3": """
benchmark = elliptic_lshape
alpha = 0.6, 1, 1.5, 2
strategy = random
eps_min = 0.1
eps_max = 4
resolution = 5, 9, 13, 17, 21
output = table3.csv
""",
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gimqfrac-bench",
        description="Run GIMQ collocation benchmarks and write CSV results.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--quad-tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for matrix assembly")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "steady benchmark from a config file"),
                       ("sweep-eps", "constant-eps sweep from a config file"),
                       ("diffuse", "time-dependent benchmark from a config file")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("config")
    for name in TABLE_CONFIGS:
        sub.add_parser(name, parents=[common], help=f"canned {name} reproduction")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command in TABLE_CONFIGS:
            cfg = parse_config(TABLE_CONFIGS[args.command])
        else:
            cfg = load_config(args.config)
        cfg = cfg.with_overrides(seed=args.seed, quad_tol=args.quad_tol)
        if args.command == "diffuse" and cfg.benchmark not in ("diffusion_hole", "heat_stripe"):
            raise ConfigError("diffuse needs a time-dependent benchmark")
        if args.command == "run" and cfg.benchmark in ("diffusion_hole", "heat_stripe"):
            raise ConfigError("use 'diffuse' for time-dependent benchmarks")
        rows = run_experiment(cfg, args.out, threads=args.threads,
                              sweep=args.command == "sweep-eps")
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExperimentError as exc:
        print(f"failed at {exc.row}: {exc.__cause__ or exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(rows)} rows to {args.out}/{cfg.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
