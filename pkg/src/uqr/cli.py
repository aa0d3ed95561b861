"""Command line: `uqr query | validate | bench`.

Exit codes: 0 ok, 1 validation mismatch, 2 parse error, 3 capability
mismatch (query shape or engine the chosen index does not support).
"""

from __future__ import annotations

import argparse
import contextlib
import random
import statistics
import sys
import time
from typing import Optional, Sequence, TextIO

from .counters import Counters
from .errors import CapabilityError, KOutOfRange, NotUniform, TauOutOfRange, UqrError
from .generators import parse_generator, random_interval
from .io import ParseError, format_result, parse_points, parse_queries
from .model import UncertainPoint
from .query import IndexBase
from .validate import BOUNDED, INDEXES, applicable_cases, auto_case, check_index

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_CAPABILITY = 0, 1, 2, 3
BENCH_HEADER = "case,n,param,engine,build_ms,query_us_p50,comparisons,bridge_steps,reported"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc.strerror}") from None


def load_points(source: str, rng: random.Random) -> list[UncertainPoint]:
    """Points from a generator spec or a points file."""
    try:
        pts = parse_generator(source, rng)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from None
    if pts is not None:
        return pts
    try:
        return parse_points(_read(source))
    except ParseError as exc:
        raise CliError(EXIT_PARSE, f"{source}: {exc}") from None


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


class IndexCache:
    def __init__(self, points: Sequence[UncertainPoint]):
        self.points = points
        self._built: dict[str, IndexBase] = {}

    def get(self, case: str) -> IndexBase:
        if case not in self._built:
            try:
                self._built[case] = INDEXES[case](self.points)
            except NotUniform as exc:
                raise CliError(EXIT_CAPABILITY, f"index {case}: {exc}") from None
        return self._built[case]


def cmd_query(args) -> int:
    rng = random.Random(args.seed)
    points = load_points(args.points, rng)
    if args.queries is None:
        raise CliError(EXIT_PARSE, "query needs --queries FILE")
    try:
        queries = parse_queries(_read(args.queries))
    except ParseError as exc:
        raise CliError(EXIT_PARSE, f"{args.queries}: {exc}") from None
    if queries and not points:
        raise CliError(EXIT_PARSE, f"{args.points}: no points")
    cache = IndexCache(points)
    lines = []
    for q in queries:
        case = auto_case(points, q.interval) if args.index == "auto" else args.index
        index = cache.get(case)
        try:
            if q.kind == "top1":
                res = index.top1(q.interval)
            elif q.kind == "topk":
                res = index.topk(q.interval, q.k, args.engine)
            else:
                res = index.threshold(q.interval, q.param)
        except CapabilityError as exc:
            raise CliError(EXIT_CAPABILITY, f"{args.queries}: line {q.line}: {exc}") from None
        except (KOutOfRange, TauOutOfRange) as exc:
            raise CliError(EXIT_PARSE, f"{args.queries}: line {q.line}: {exc}") from None
        lines.append(format_result(q.qid, q.kind, res.items))
    with _output(args.out) as out:
        for line in lines:
            out.write(line + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    rng = random.Random(args.seed)
    points = load_points(args.points, rng)
    if not points:
        raise CliError(EXIT_PARSE, f"{args.points}: no points")
    per_type = int(args.queries) if args.queries is not None else 100
    cases = applicable_cases(points) if args.index == "auto" else [args.index]
    cache = IndexCache(points)
    failed = False
    with _output(args.out) as out:
        for case in cases:
            index = cache.get(case)
            engines = None
            if args.engine != "auto":
                if args.engine not in index.engines:
                    raise CliError(EXIT_CAPABILITY, f"index {case} has no {args.engine!r} engine")
                engines = [args.engine]
            report = check_index(case, index, random.Random(f"{args.seed}:{case}"), per_type, engines)
            for m in report.mismatches:
                out.write(m.describe() + f" seed={args.seed}\n")
            status = "ok" if not report.mismatches else "FAIL"
            out.write(f"{case}: {report.queries} queries per type, {report.checks} checks, {len(report.mismatches)} mismatches: {status}\n")
            failed |= bool(report.mismatches)
    return EXIT_MISMATCH if failed else EXIT_OK


def _int_list(text: Optional[str]) -> list[int]:
    return [int(t) for t in text.split(",")] if text else []


def _float_list(text: Optional[str]) -> list[float]:
    return [float(t) for t in text.split(",")] if text else []


def _bench_rows(case, n, index, build_ms, queries, params, engines, timing):
    rows = []
    for kind, val in params:
        engs = engines if kind == "k" else ["-"]
        for eng in engs:
            cnt = Counters()
            times = []
            for I in queries:
                t0 = time.perf_counter()
                if kind == "k":
                    index.topk(I, min(int(val), n), eng, cnt)
                elif kind == "tau":
                    index.threshold(I, val, cnt)
                else:
                    index.top1(I, cnt)
                times.append((time.perf_counter() - t0) * 1e6)
            m = len(queries)
            p50 = statistics.median(times) if timing else 0.0
            param = "top1" if kind == "top1" else f"{kind}={val:g}"
            rows.append(
                f"{case},{n},{param},{eng},{build_ms if timing else 0.0:.3f},{p50:.3f},"
                f"{cnt.comparisons / m:.3f},{cnt.bridge_steps / m:.3f},{cnt.reported / m:.3f}"
            )
    return rows


def cmd_bench(args) -> int:
    spec = args.points
    sizes = _int_list(args.n)
    ks = _int_list(args.k) or [1, 16]
    taus = _float_list(args.tau) or [0.5]
    per_config = int(args.queries) if args.queries is not None else 50
    params = [("k", k) for k in ks] + [("tau", t) for t in taus] + [("top1", None)]
    runs = []
    if sizes:
        parts = spec.split(":")
        if parts[0] not in ("rand-uniform", "rand-hist"):
            raise CliError(EXIT_PARSE, "--n sweeps need a generator spec for --points")
        for n in sizes:
            runs.append(":".join([parts[0], str(n)] + parts[2:]))
    else:
        runs.append(spec)
    with _output(args.out) as out:
        out.write(BENCH_HEADER + "\n")
        for i, source in enumerate(runs):
            rng = random.Random(f"{args.seed}:{i}")
            points = load_points(source, rng)
            if not points:
                raise CliError(EXIT_PARSE, f"{source}: no points")
            cases = applicable_cases(points) if args.index == "auto" else [args.index]
            for case in cases:
                t0 = time.perf_counter()
                try:
                    index = INDEXES[case](points)
                except NotUniform as exc:
                    raise CliError(EXIT_CAPABILITY, f"index {case}: {exc}") from None
                build_ms = (time.perf_counter() - t0) * 1e3
                qrng = random.Random(f"{args.seed}:{i}:{case}")
                queries = [random_interval(qrng, points, BOUNDED[case]) for _ in range(per_config)]
                if args.engine == "auto":
                    engines = list(index.engines)
                elif args.engine in index.engines:
                    engines = [args.engine]
                else:
                    raise CliError(EXIT_CAPABILITY, f"index {case} has no {args.engine!r} engine")
                for row in _bench_rows(case, len(points), index, build_ms, queries, params, engines, not args.no_timing):
                    out.write(row + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uqr", description="Top-1, top-k and threshold queries over uncertain points.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, queries_help):
        p.add_argument("--points", required=True, help="points file, or rand-uniform:N / rand-hist:N:C")
        p.add_argument("--queries", help=queries_help)
        p.add_argument("--index", default="auto", choices=["auto", "uu", "ub", "hu", "hb"])
        p.add_argument("--engine", default="auto", choices=["heap", "select", "block", "auto"])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output here instead of standard output")

    common(sub.add_parser("query", help="answer the queries in a file"), "query file")
    common(sub.add_parser("validate", help="compare every index and engine with the oracle"), "random queries per type (default 100)")
    bench = sub.add_parser("bench", help="CSV of operation counters and timings")
    common(bench, "queries per configuration (default 50)")
    bench.add_argument("--n", help="comma-separated sizes to sweep (generator specs only)")
    bench.add_argument("--k", help="comma-separated k values (default 1,16)")
    bench.add_argument("--tau", help="comma-separated thresholds (default 0.5)")
    bench.add_argument("--no-timing", action="store_true", help="print 0 for timing columns so output is reproducible")
    return ap


def main(argv: Optional[Sequence[str]] = None, stderr: TextIO = sys.stderr) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    handler = {"query": cmd_query, "validate": cmd_validate, "bench": cmd_bench}[args.command]
    try:
        return handler(args)
    except CliError as exc:
        print(f"uqr: {exc}", file=stderr)
        return exc.code
    except UqrError as exc:
        print(f"uqr: {exc}", file=stderr)
        return EXIT_CAPABILITY if isinstance(exc, CapabilityError) else EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
