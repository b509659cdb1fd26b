"""Command-line entry point: seeded sweep experiments to CSV.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
failing realization's replay seed is printed to stderr).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DegenerateChannelError
from .harness import (
    SWEEP_KINDS,
    NumericalFailure,
    desk_spec,
    load_spec,
    paper_spec,
    run_complexity,
    run_convergence,
    run_sweep,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Seeded Monte-Carlo sweeps for the reflecting-surface THz link.",
    )
    parser.add_argument("--config", type=Path, default=None, help="JSON experiment spec")
    parser.add_argument("--sweep", choices=SWEEP_KINDS, default=None, help="sweep kind")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--realizations", type=int, default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--paper-scale",
        action="store_true",
        help="use the large-scale preset (512/128/32 antennas, 1000 draws; slow)",
    )
    return parser


def _build_spec(args):
    if args.config is not None:
        spec = load_spec(args.config)
    elif args.paper_scale:
        spec = paper_spec()
    else:
        spec = desk_spec()
    if args.paper_scale and args.config is not None:
        raise ConfigError("--paper-scale cannot be combined with --config")
    if args.sweep is not None:
        spec = replace(spec, sweep_kind=args.sweep, sweep_values=())
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.realizations is not None:
        spec = replace(spec, realizations=args.realizations)
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _build_spec(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / f"{spec.sweep_kind}.csv"
    try:
        if spec.sweep_kind == "convergence":
            run_convergence(spec, out_path=out_path, threads=args.threads)
        elif spec.sweep_kind == "complexity":
            run_complexity(spec, out_path=out_path)
        else:
            run_sweep(spec, out_path=out_path, threads=args.threads)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (DegenerateChannelError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(out_path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
