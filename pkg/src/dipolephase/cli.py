"""Command-line driver.

    dipolephase electric [--config FILE] [--set key=value ...] [--methods LIST]
    dipolephase magnetic ...
    dipolephase sweep --kind electric --param v0 --values 0.1,0.2,0.5
    dipolephase verify [--list]

Tables are CSV with one header row. With ``--out`` a sidecar
``<out>.manifest.json`` records the resolved configuration; with
``--format structured`` the manifest is embedded in a single JSON document.

Exit codes: 0 success, 1 failed verification, 2 usage or config error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .acceptance import CHECKS, run_checks
from .config import load_config
from .core import ConvergenceError, DomainError
from .report import SWEEP_KEYS, electric_rows, magnetic_rows, parse_methods, sweep_table

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_CONVERGENCE = 0, 1, 2, 3


def _manifest(cfg, argv, seedless):
    return {
        "tool": "dipolephase",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "argv": list(argv),
        "seedless": bool(seedless),
        "config": dict(sorted(cfg.flat.items())),
    }


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v) + 0.0) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json_value(v):
    # NaN marks a skipped method; JSON has no NaN literal
    if isinstance(v, float):
        return None if math.isnan(v) else float(v) + 0.0
    return v


def _emit(args, header, rows, manifest):
    if args.format == "structured":
        doc = {"manifest": manifest, "columns": list(header),
               "rows": [[_json_value(v) for v in row] for row in rows]}
        text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    else:
        text = _csv_text(header, rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        if args.format != "structured":
            with open(f"{args.out}.manifest.json", "w") as fh:
                json.dump(manifest, fh, indent=2)
                fh.write("\n")
    else:
        sys.stdout.write(text)


def _single(args, cfg, argv, builder):
    methods = parse_methods(args.methods)
    rows = builder(cfg, methods)
    table = [(r.method, r.quantity, float(r.value), float(r.error_estimate)) for r in rows]
    _emit(args, ("method", "quantity", "value", "error_estimate"), table, _manifest(cfg, argv, args.seedless))
    return EXIT_OK


def _grid(args):
    if args.values:
        return [float(v) for v in args.values.split(",") if v.strip()]
    lo, hi, n = args.logspace
    return list(np.logspace(np.log10(lo), np.log10(hi), int(n)))


def cmd_sweep(args, cfg, argv):
    methods = parse_methods(args.methods) if args.methods else ("closed", "wkb")
    header, table = sweep_table(cfg, args.kind, args.param, _grid(args), methods, jobs=args.jobs)
    manifest = _manifest(cfg, argv, args.seedless)
    manifest["sweep"] = {"kind": args.kind, "param": args.param, "key": SWEEP_KEYS[args.param]}
    _emit(args, header, table, manifest)
    return EXIT_OK


def cmd_verify(args, cfg, argv):
    if args.list:
        for key, (title, _) in CHECKS.items():
            print(f"{key}\t{title}")
        return EXIT_OK
    keys = args.only.split(",") if args.only else None
    if keys and any(k not in CHECKS for k in keys):
        raise DomainError(f"unknown check in {args.only!r}; see --list")
    results = run_checks(cfg, keys)
    header = ("check", "title", "passed", "measured", "expected", "tolerance", "runtime_s", "detail")
    rows = [(r.key, r.title, "PASS" if r.passed else "FAIL", float(r.measured), float(r.expected),
             float(r.tolerance), float(r.runtime), r.detail) for r in results]
    _emit(args, header, rows, _manifest(cfg, argv, args.seedless))
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed", file=sys.stderr)
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file ([section] key = value)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, e.g. beam.v0=2 (repeatable)")
    common.add_argument("--methods", help="comma list from closed,quadrature,trajectory,wkb or 'all'")
    common.add_argument("--out", help="write the table here instead of stdout")
    common.add_argument("--format", choices=("table", "structured"), default="table")
    common.add_argument("--seedless", action="store_true",
                        help="assert a fully deterministic run (nothing here uses an RNG)")

    parser = argparse.ArgumentParser(prog="dipolephase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("electric", parents=[common], help="electric dipole line: lag and phase by each method")
    sub.add_parser("magnetic", parents=[common], help="solenoid: lag and phase by each method")
    sw = sub.add_parser("sweep", parents=[common], help="tabulate results over a parameter grid")
    sw.add_argument("--kind", choices=("electric", "magnetic"), default="electric")
    sw.add_argument("--param", required=True, help=f"one of {', '.join(SWEEP_KEYS)}")
    grid = sw.add_mutually_exclusive_group(required=True)
    grid.add_argument("--values", help="comma separated grid values")
    grid.add_argument("--logspace", nargs=3, type=float, metavar=("LO", "HI", "N"))
    sw.add_argument("--jobs", type=int, default=1, help="worker processes (row order is always grid order)")
    ver = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    ver.add_argument("--list", action="store_true", help="list the checks without running them")
    ver.add_argument("--only", help="comma list of check ids")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config, args.set)
        if args.command == "electric":
            return _single(args, cfg, argv, electric_rows)
        if args.command == "magnetic":
            return _single(args, cfg, argv, magnetic_rows)
        if args.command == "sweep":
            if args.param not in SWEEP_KEYS:
                raise DomainError(f"cannot sweep {args.param!r}; choose from {', '.join(SWEEP_KEYS)}")
            return cmd_sweep(args, cfg, argv)
        return cmd_verify(args, cfg, argv)
    except ConvergenceError as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        sys.exit(main())


if __name__ == "__main__":
    entry()
