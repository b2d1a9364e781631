"""Command-line front end: ``bdivisor <subcommand> [flags]``.

Exit codes: 0 when every check passes, 1 when any fails, 2 on usage or
configuration errors.  ``BDIVISOR_WORKERS`` sets the size of the process
pool that runs check groups; output order never depends on it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import jacobi, lattice
from .report import SCHEMA, fmt
from .suite import CRITERIA, GROUPS, RunConfig, default_ells, run_group

SUBCOMMANDS = ["surface", "tower", "zeta", "dim", "theta-check", "residue", "toric", "verify-all"]


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdivisor",
                                     description="Verification harness for the b-divisor of theta^8.")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--level", type=int, default=4)
        p.add_argument("--depth", type=int, default=6)
        p.add_argument("--window", type=int, default=300)
        p.add_argument("--ell", type=int, nargs="+", default=None)
        p.add_argument("--tol", default=None, help="override every numeric tolerance")
        p.add_argument("--precision", type=int, default=50, help="mpmath working digits (>= 30)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", default=None, metavar="FILE")
    return parser


def workers() -> int:
    raw = os.environ.get("BDIVISOR_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"BDIVISOR_WORKERS must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("BDIVISOR_WORKERS must be >= 1")
    return value


def run_all(funcs, cfg: RunConfig, n_workers: int):
    """Run groups, possibly in parallel, returning reports in ``funcs`` order."""
    if n_workers == 1 or len(funcs) == 1:
        return [r for f in funcs for r in run_group(f, cfg)]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(run_group, f, cfg) for f in funcs]
        return [r for fut in futures for r in fut.result()]


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _table(command: str, cfg: RunConfig) -> list[dict] | None:
    """Numeric tables that CSV output replaces the report list with."""
    if command == "tower":
        return [{k: fmt(v) if k in ("S", "self_int", "gap") else v for k, v in row.items()}
                | {"gap_float": repr(float(row["gap"]))}
                for row in lattice.convergence_table(cfg.level, cfg.depth)]
    if command == "dim":
        out = []
        for ell in cfg.ell or default_ells(cfg.level):
            r = jacobi.dim_cusp(cfg.level, ell)
            out.append({"level": r.level, "ell": r.ell, "dim": fmt(r.dim), "ratio": fmt(r.ratio),
                        "gap": fmt(r.gap), "gap_float": repr(float(r.gap))})
        return out
    return None


def render(command: str, cfg: RunConfig, reports) -> str:
    if cfg.output_format == "csv":
        table = _table(command, cfg)
        if table is None:
            table = [{"check_name": r.check_name, "target": r.target, "computed": r.computed,
                      "bound": r.bound, "pass": fmt(r.passed), "runtime_ms": r.runtime_ms}
                     for r in reports]
        return _csv(table)
    doc = {
        "schema": SCHEMA,
        "command": command,
        "config": cfg.to_json(),
        "pass": all(r.passed for r in reports),
        "reports": [r.to_json() for r in reports],
    }
    return json.dumps(doc, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(level=args.level, depth=args.depth, window=args.window, tol=args.tol,
                        precision=args.precision, seed=args.seed, output_format=args.format,
                        ell=tuple(args.ell) if args.ell else None).validate()
        if cfg.ell:
            for ell in cfg.ell:
                if ell < 1 or (4 * ell) % cfg.level:
                    raise ValueError(f"--ell {ell} needs N | 4l")
        n_workers = workers()
    except (ValueError, TypeError, UsageError) as exc:
        print(f"bdivisor: error: {exc}", file=sys.stderr)
        return 2

    funcs = CRITERIA if args.command == "verify-all" else GROUPS[args.command]
    reports = run_all(funcs, cfg, n_workers)
    text = render(args.command, cfg, reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
