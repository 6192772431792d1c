"""Command-line driver.

Subcommands:

* ``enumerate``   write a catalog of admissible weight systems
* ``classify``    scan two catalog files for passing forgetful maps
* ``verify``      recompute the reference tables and diff against them
* ``inclusions``  print the hyperbolic contractions of one weight system

Exit codes: 0 success, 1 verification mismatch, 2 usage error.  The
environment variable ``FORGETMAPS_WORKERS`` overrides the worker count
used for enumeration and scanning (default 1; results do not depend on
it).
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import files
from .enumeration import MODES, canonicalize, enumerate_catalog
from .forgetful import (
    DEFAULT_STRICTNESS,
    STAGES,
    STRICTNESS_MODES,
    ScanFilters,
    scan,
)
from .geodesic import hyperbolic_contractions
from .reference import build_catalogs, run_verification
from .weights import WeightSystem, WeightSystemError, check_int

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


def _workers() -> int:
    raw = os.environ.get("FORGETMAPS_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise SystemExit(f"FORGETMAPS_WORKERS must be an integer, got {raw!r}")
    return max(1, value)


def _cmd_enumerate(args: argparse.Namespace) -> int:
    entries = enumerate_catalog(args.points, args.max_den, args.mode, workers=_workers())
    try:
        with open(args.out, "w") as handle:
            files.write_catalog(entries, handle)
    except OSError as err:
        print(f"cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_USAGE
    cocompact = sum(1 for e in entries if e.cocompact)
    ints = sum(1 for e in entries if e.satisfies_int)
    print(
        f"{len(entries)} systems with {args.points} points, lcd <= {args.max_den}, "
        f"mode {args.mode} ({cocompact} cocompact, {ints} INT) -> {args.out}"
    )
    return EXIT_OK


def _cmd_classify(args: argparse.Namespace) -> int:
    try:
        with open(args.src) as handle:
            sources = files.read_catalog(handle)
        with open(args.tgt) as handle:
            targets = files.read_catalog(handle)
    except OSError as err:
        print(f"cannot read catalog: {err}", file=sys.stderr)
        return EXIT_USAGE
    filters = ScanFilters(
        source_dim=args.source_dim,
        target_dim=args.target_dim,
        cocompact_only=args.cocompact_only,
        require_noncompact_side=args.require_noncompact_side,
        stage=args.stage,
        strictness=args.divisibility,
    )
    records = scan(sources, targets, filters, workers=_workers())
    try:
        with open(args.out, "w") as handle:
            files.write_results(records, handle)
    except OSError as err:
        print(f"cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{len(records)} passing source/target pairs at stage {args.stage} -> {args.out}")
    for record in records:
        src = f"({','.join(map(str, record.source.numerators()))})/{record.source.lcd}"
        tgt = f"({','.join(map(str, record.target.numerators()))})/{record.target.lcd}"
        combos = sum(len(m.combos) for m in record.maps)
        dual = " [dual partner present]" if record.dual_partner else ""
        print(f"  {src} -> {tgt}: {len(record.maps)} alignment classes, {combos} partition pairs{dual}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    workers = _workers()
    catalogs = build_catalogs(workers=workers)
    if args.workdir:
        try:
            os.makedirs(args.workdir, exist_ok=True)
            for k, entries in catalogs.items():
                with open(os.path.join(args.workdir, f"catalog-k{k}.jsonl"), "w") as handle:
                    files.write_catalog(entries, handle)
        except OSError as err:
            print(f"cannot populate workdir: {err}", file=sys.stderr)
            return EXIT_USAGE
    report = run_verification(strictness=args.divisibility, workers=workers, catalogs=catalogs)
    print(f"divisibility mode: {report.strictness}")
    for fixture in report.fixtures:
        status = "PASS" if fixture.passed else "FAIL"
        print(f"{status}  {fixture.name}")
        for line in fixture.details:
            print(f"      {line}")
    if args.divisibility != DEFAULT_STRICTNESS:
        base = run_verification(strictness=DEFAULT_STRICTNESS, workers=workers, catalogs=catalogs)
        changed = [
            f.name
            for f, b in zip(report.fixtures, base.fixtures)
            if f.passed != b.passed
        ]
        if changed:
            print(f"outcome differs from mode {DEFAULT_STRICTNESS} for: {', '.join(changed)}")
        else:
            print(f"outcomes identical to mode {DEFAULT_STRICTNESS}")
    return EXIT_OK if report.passed else EXIT_MISMATCH


def _cmd_inclusions(args: argparse.Namespace) -> int:
    try:
        numerators = [int(part) for part in args.weights.split(",")]
    except ValueError:
        print(f"--weights must be a comma-separated integer list, got {args.weights!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        mu = WeightSystem.from_numerators(numerators, args.den)
    except WeightSystemError as err:
        print(f"invalid weight system: {err}", file=sys.stderr)
        return EXIT_USAGE
    rows = hyperbolic_contractions(mu)
    print(f"{len(rows)} hyperbolic contractions of ({','.join(map(str, numerators))})/{args.den}")
    lines = []
    for subset, child in rows:
        canon = canonicalize(child)
        flag = "INT" if check_int(child) else "not INT"
        print(
            f"  merge {{{','.join(map(str, subset))}}} -> "
            f"({','.join(map(str, canon.numerators()))})/{canon.lcd}  [{flag}]"
        )
        lines.append(
            {
                "subset": list(subset),
                "child_num": list(canon.numerators()),
                "child_den": canon.lcd,
                "codimension": len(subset) - 1,
                "int": check_int(child),
            }
        )
    if args.out:
        import json

        try:
            with open(args.out, "w") as handle:
                for line in lines:
                    handle.write(json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n")
        except OSError as err:
            print(f"cannot write {args.out}: {err}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forgetmaps",
        description="Exact enumeration of weighted point systems and classification of forgetful maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="write a catalog of admissible weight systems")
    p_enum.add_argument("--points", type=int, required=True, help="number of weighted points (>= 4)")
    p_enum.add_argument("--max-den", type=int, required=True, help="largest least common denominator")
    p_enum.add_argument("--mode", choices=MODES, default="half")
    p_enum.add_argument("--out", required=True)
    p_enum.set_defaults(func=_cmd_enumerate)

    p_cls = sub.add_parser("classify", help="scan two catalogs for passing forgetful maps")
    p_cls.add_argument("--src", required=True, help="source catalog file")
    p_cls.add_argument("--tgt", required=True, help="target catalog file")
    p_cls.add_argument("--out", required=True, help="result file")
    p_cls.add_argument("--source-dim", type=int, default=None)
    p_cls.add_argument("--target-dim", type=int, default=None)
    p_cls.add_argument("--cocompact-only", action="store_true")
    p_cls.add_argument("--require-noncompact-side", action="store_true")
    p_cls.add_argument("--stage", choices=STAGES, default="divisibility")
    p_cls.add_argument("--divisibility", choices=STRICTNESS_MODES, default=DEFAULT_STRICTNESS)
    p_cls.set_defaults(func=_cmd_classify)

    p_ver = sub.add_parser("verify", help="recompute and diff the reference classification tables")
    p_ver.add_argument("--workdir", default=None, help="optionally write the computed catalogs here")
    p_ver.add_argument("--divisibility", choices=STRICTNESS_MODES, default=DEFAULT_STRICTNESS)
    p_ver.set_defaults(func=_cmd_verify)

    p_inc = sub.add_parser("inclusions", help="hyperbolic contractions of one weight system")
    p_inc.add_argument("--weights", required=True, help="comma-separated numerators, e.g. 3,3,3,3,3,1")
    p_inc.add_argument("--den", type=int, required=True, help="common denominator")
    p_inc.add_argument("--out", default=None, help="optionally export the edges as JSON lines")
    p_inc.set_defaults(func=_cmd_inclusions)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "enumerate":
        if args.points < 4:
            parser.error("--points must be at least 4")
        if args.max_den < 2:
            parser.error("--max-den must be at least 2")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
