"""Seeded random instances and queries.

Values are drawn from a small grid part of the time so that ties,
shared breakpoints and queries landing exactly on breakpoints are
common, not just possible.
"""

from __future__ import annotations

import math
import random
from typing import Optional

from .model import INF, HistogramPdf, QueryInterval, UncertainPoint, UniformPdf

# fraction of coordinates snapped to the half-integer grid
GRID_SHARE = 0.25


def _coord(rng: random.Random, lo: float, hi: float) -> float:
    x = rng.uniform(lo, hi)
    if rng.random() < GRID_SHARE:
        x = round(x * 2) / 2
    return x


def _span(n: int) -> float:
    return max(20.0, 4.0 * math.sqrt(n))


def random_uniform_points(n: int, rng: random.Random) -> list[UncertainPoint]:
    span = _span(n)
    out = []
    for i in range(n):
        lo = _coord(rng, 0.0, span)
        w = _coord(rng, 0.5, 10.0)
        if w <= 0.0:
            w = 0.5
        out.append(UncertainPoint(i + 1, UniformPdf(lo, lo + w)))
    return out


def random_histogram_pdf(c: int, rng: random.Random, span: float) -> HistogramPdf:
    """A histogram with c bounded bins; about one bin in six is empty."""
    breaks = [_coord(rng, 0.0, span)]
    for _ in range(c):
        w = _coord(rng, 0.25, 3.0)
        breaks.append(breaks[-1] + max(w, 0.25))
    weights = [0.0 if rng.random() < 1 / 6 else rng.choice([1.0, 2.0, rng.random() + 0.01]) for _ in range(c)]
    if not any(weights):
        weights[rng.randrange(c)] = 1.0
    mass = math.fsum(wt * (b - a) for wt, a, b in zip(weights, breaks, breaks[1:]))
    return HistogramPdf(tuple(breaks), tuple(wt / mass for wt in weights))


def random_histogram_points(n: int, c: int, rng: random.Random) -> list[UncertainPoint]:
    span = _span(n)
    return [UncertainPoint(i + 1, random_histogram_pdf(c, rng, span)) for i in range(n)]


def _query_coord(rng: random.Random, points: list[UncertainPoint]) -> float:
    """A query coordinate: usually random, sometimes exactly on a breakpoint."""
    if rng.random() < 0.2:
        p = rng.choice(points)
        return rng.choice(p.cdf.breaks)
    lo = min(p.cdf.breaks[0] for p in points) - 2.0
    hi = max(p.cdf.breaks[-1] for p in points) + 2.0
    return _coord(rng, lo, hi)


def random_interval(rng: random.Random, points: list[UncertainPoint], bounded: bool) -> QueryInterval:
    a = _query_coord(rng, points)
    if not bounded:
        return QueryInterval(-INF, a) if rng.random() < 0.5 else QueryInterval(a, INF)
    r = rng.random()
    if r < 0.05:
        b = a
    elif r < 0.25:
        b = _query_coord(rng, points)
    else:
        b = a + _coord(rng, 0.0, 8.0)
    return QueryInterval(min(a, b), max(a, b))


def random_k(rng: random.Random, n: int) -> int:
    """k log-uniform in [1, n], so small and large k are both common."""
    return max(1, min(n, int(round(math.exp(rng.uniform(0.0, math.log(n)))))))


def random_tau(rng: random.Random, probs: Optional[list[float]] = None) -> float:
    """tau: random, an exact probability value (tests inclusive >=), or 0 / 1."""
    r = rng.random()
    if probs and r < 0.3:
        return rng.choice(probs)
    if r < 0.4:
        return rng.choice([0.0, 1.0, 0.5])
    return rng.random()


def parse_generator(spec: str, rng: random.Random) -> Optional[list[UncertainPoint]]:
    """Points for `rand-uniform:n` or `rand-hist:n:c`, else None."""
    parts = spec.split(":")
    if parts[0] == "rand-uniform" and len(parts) == 2:
        return random_uniform_points(_positive(parts[1]), rng)
    if parts[0] == "rand-hist" and len(parts) == 3:
        return random_histogram_points(_positive(parts[1]), _positive(parts[2]), rng)
    if parts[0] in ("rand-uniform", "rand-hist"):
        raise ValueError(f"bad generator spec {spec!r}")
    return None


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {s!r}")
    return v
