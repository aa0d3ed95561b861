"""Index-versus-oracle comparison shared by the CLI and the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .generators import random_interval, random_k, random_tau
from .histogram_bounded import HistogramBoundedIndex
from .histogram_unbounded import HistogramUnboundedIndex
from .io import fmt_float
from .model import QueryInterval, UncertainPoint
from .oracle import brute_all
from .query import IndexBase
from .uniform_bounded import UniformBoundedIndex
from .uniform_unbounded import UniformUnboundedIndex

INDEXES: dict[str, type[IndexBase]] = {
    "uu": UniformUnboundedIndex,
    "ub": UniformBoundedIndex,
    "hu": HistogramUnboundedIndex,
    "hb": HistogramBoundedIndex,
}
BOUNDED = {"uu": False, "ub": True, "hu": False, "hb": True}
PROB_TOLERANCE = 1e-9


def applicable_cases(points: Sequence[UncertainPoint]) -> list[str]:
    if all(p.is_uniform for p in points):
        return ["uu", "ub", "hu", "hb"]
    return ["hu", "hb"]


def auto_case(points: Sequence[UncertainPoint], interval: QueryInterval) -> str:
    uniform = all(p.is_uniform for p in points)
    if interval.bounded:
        return "ub" if uniform else "hb"
    return "uu" if uniform else "hu"


@dataclass
class Mismatch:
    case: str
    engine: str
    kind: str
    interval: QueryInterval
    param: Optional[float]
    got: list
    expected: list

    def describe(self) -> str:
        lo, hi = fmt_float(self.interval.lo), fmt_float(self.interval.hi)
        p = "" if self.param is None else f" param={fmt_float(self.param)}"
        return f"MISMATCH case={self.case} engine={self.engine} {self.kind} [{lo}, {hi}]{p} got={self.got} expected={self.expected}"


def same_ranking(got: list[tuple[int, float]], expected: list[tuple[int, float]]) -> bool:
    """Same ids in the same order, probabilities within tolerance."""
    if [i for i, _ in got] != [i for i, _ in expected]:
        return False
    return all(abs(a - b) <= PROB_TOLERANCE for (_, a), (_, b) in zip(got, expected))


@dataclass
class CaseReport:
    case: str
    queries: int = 0
    checks: int = 0
    mismatches: list = None

    def __post_init__(self):
        if self.mismatches is None:
            self.mismatches = []


def check_index(
    case: str, index: IndexBase, rng: random.Random, per_type: int, engines: Optional[Sequence[str]] = None
) -> CaseReport:
    """Run `per_type` random top-1, top-k and threshold queries against the oracle."""
    points = list(index.points.values())
    report = CaseReport(case)
    engines = list(engines) if engines is not None else list(index.engines)
    for _ in range(per_type):
        I = random_interval(rng, points, BOUNDED[case])
        truth = brute_all(points, I)
        report.queries += 1
        got = index.top1(I).items
        report.checks += 1
        if not same_ranking(got, truth[:1]):
            report.mismatches.append(Mismatch(case, "-", "top1", I, None, got, truth[:1]))
        k = random_k(rng, len(points))
        for eng in engines:
            got = index.topk(I, k, eng).items
            report.checks += 1
            if not same_ranking(got, truth[:k]):
                report.mismatches.append(Mismatch(case, eng, "topk", I, float(k), got, truth[:k]))
        tau = random_tau(rng, [p for _, p in truth])
        got_ids = sorted(i for i, _ in index.threshold(I, tau).items)
        want_ids = sorted(i for i, p in truth if p >= tau)
        report.checks += 1
        if got_ids != want_ids:
            report.mismatches.append(Mismatch(case, "-", "thresh", I, tau, got_ids, want_ids))
    return report
