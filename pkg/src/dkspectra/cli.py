"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 engine error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from .graphs import GraphError, parse_family, parse_graph
from .oracle import DEFAULT_CEILING
from .report import CHECKS, ENGINES, EngineError, RunConfig, build_report, emit

CEILING_ENV = "DKSPECTRA_EXPLICIT_CEILING"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_ENGINE = 0, 1, 2, 3


class UsageError(Exception):
    def __init__(self, message: str, flag: str | None = None):
        super().__init__(message)
        self.flag = flag


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(
        prog="dkspectra",
        description="Moments of N^(-k/2) A^[N,k] for Cartesian powers G^N against their Hermite limit.",
    )
    src = p.add_argument_group("graph source (exactly one)")
    src.add_argument("--graph", metavar="FILE", help="edge-list file")
    src.add_argument("--family", metavar="TAG", help="named family: K:d, P:n, C:n or S:n")
    p.add_argument("--k", type=int, required=True, help="distance k >= 1")
    p.add_argument("--mmax", type=int, default=6, help="highest moment order (default 6)")
    p.add_argument("--N", dest="N", default="4,8,16,32,64", help="comma-separated ascending N schedule")
    p.add_argument("--engine", default="tensor", choices=ENGINES)
    p.add_argument("--check", action="append", default=[], metavar="NAME",
                   help=f"run a check; repeatable; one of {', '.join(CHECKS)} or 'all'")
    p.add_argument("--out", default="json", choices=("json", "csv"))
    p.add_argument("--hist", metavar="BINS:LO:HI", help="histogram of explicit spectra and of the limit law")
    p.add_argument("--seed", type=int, default=0, help="seed for the limit-law sampler")
    p.add_argument("--explicit-ceiling", type=int, default=None,
                   help=f"largest |V|^N built explicitly (default ${CEILING_ENV} or {DEFAULT_CEILING})")
    return p


def _parse_schedule(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--N: malformed list {text!r}; expected comma-separated integers", "--N") from None
    if not values or any(v < 1 for v in values):
        raise UsageError(f"--N: values must be positive integers, got {text!r}", "--N")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"--N: schedule must be strictly ascending, got {text!r}", "--N")
    return values


def _parse_hist(text: str) -> tuple[int, float, float]:
    parts = text.split(":")
    try:
        bins, lo, hi = int(parts[0]), float(parts[1]), float(parts[2])
        if len(parts) != 3:
            raise ValueError
    except (ValueError, IndexError):
        raise UsageError(f"--hist: expected BINS:LO:HI, got {text!r}", "--hist") from None
    if bins < 1 or not hi > lo:
        raise UsageError(f"--hist: need BINS >= 1 and LO < HI, got {text!r}", "--hist")
    return bins, lo, hi


def _default_ceiling() -> int:
    raw = os.environ.get(CEILING_ENV)
    if raw is None:
        return DEFAULT_CEILING
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{CEILING_ENV}: not an integer: {raw!r}", "--explicit-ceiling") from None


def parse_config(argv: Sequence[str]) -> RunConfig:
    args = _build_parser().parse_args(list(argv))
    if (args.graph is None) == (args.family is None):
        raise UsageError("--graph/--family: give exactly one graph source", "--graph")
    if args.family is not None:
        try:
            graph = parse_family(args.family)
        except GraphError as exc:
            raise UsageError(f"--family: {exc}", "--family") from None
        source = args.family
    else:
        try:
            text = Path(args.graph).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"--graph: cannot read {args.graph!r}: {exc.strerror}", "--graph") from None
        try:
            graph = parse_graph(text, name=Path(args.graph).name)
        except GraphError as exc:
            raise UsageError(f"--graph: {exc}", "--graph") from None
        source = args.graph
    if args.k < 1:
        raise UsageError(f"--k: must be >= 1, got {args.k}", "--k")
    if args.mmax < 1:
        raise UsageError(f"--mmax: must be >= 1, got {args.mmax}", "--mmax")
    checks: list[str] = []
    for name in args.check:
        names = CHECKS if name == "all" else (name,)
        for n in names:
            if n not in CHECKS:
                raise UsageError(f"--check: unknown check {n!r}; choose from {', '.join(CHECKS)}", "--check")
            if n not in checks:
                checks.append(n)
    ceiling = args.explicit_ceiling if args.explicit_ceiling is not None else _default_ceiling()
    if ceiling < 1:
        raise UsageError(f"--explicit-ceiling: must be positive, got {ceiling}", "--explicit-ceiling")
    return RunConfig(
        graph=graph,
        graph_source=source,
        k=args.k,
        m_max=args.mmax,
        N_schedule=_parse_schedule(args.N),
        engine=args.engine,
        checks=tuple(checks),
        output=args.out,
        hist=_parse_hist(args.hist) if args.hist else None,
        seed=args.seed,
        explicit_ceiling=ceiling,
    )


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"dkspectra: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = build_report(cfg)
    except EngineError as exc:
        print(f"dkspectra: engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    emit(report, cfg.output, sys.stdout)
    for c in report.checks:
        print(f"check {c['name']}: {'PASS' if c['passed'] else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
