"""Command line interface: ``maxplus-ifs {attractor,hfd,oracle-check,dtheta}``.

Exit codes: 0 success, 1 failed oracle check, 2 configuration error,
3 numerical error, 4 oracle budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import MaxPlusIFSError
from .io import load_config
from .pipeline import run_attractor, run_dtheta, run_hfd, run_oracle_check


def _emit(payload: dict):
    print(json.dumps({k: v for k, v in payload.items() if not k.startswith("_")}, indent=2))


def cmd_attractor(args) -> int:
    cfg = load_config(args.config)
    run = run_attractor(cfg, binary=True if args.binary else None)
    _emit(run.summary())
    return 0


def cmd_hfd(args) -> int:
    _emit(run_hfd(args.source, args.kmax, fit_path=args.out))
    return 0


def cmd_oracle(args) -> int:
    report = run_oracle_check(load_config(args.config), depth=args.depth)
    _emit(report)
    return 0 if report["passed"] else 1


def cmd_dtheta(args) -> int:
    _emit({"dtheta": run_dtheta(args.density_a, args.density_b)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxplus-ifs",
        description="Invariant idempotent measures of max-plus IFS and their Higuchi dimension")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attractor", help="iterate to the discrete invariant density")
    p.add_argument("config")
    p.add_argument("--binary", action="store_true", help="write a binary P5 image")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("hfd", help="Higuchi dimension of an attractor or a series file")
    p.add_argument("source", help="JSON config, density/fuzzy CSV, PGM or numeric text file")
    p.add_argument("--kmax", type=int, action="append",
                   help="largest scale; repeat for several (default: config higuchi.k_max)")
    p.add_argument("--out", help="fit CSV path (default: config outputs.fit_path)")
    p.set_defaults(func=cmd_hfd)

    p = sub.add_parser("oracle-check", help="compare the engine with word enumeration")
    p.add_argument("config")
    p.add_argument("--depth", type=int, help="word length (default: config oracle.depth)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("dtheta", help="level-set distance between two density CSVs")
    p.add_argument("density_a")
    p.add_argument("density_b")
    p.set_defaults(func=cmd_dtheta)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MaxPlusIFSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
