"""Brute-force reference answers.

Only `model.interval_probability` and sorting are used here, so a bug
in the geometric code cannot cancel out against the reference.
"""

from __future__ import annotations

from typing import Sequence

from .errors import KOutOfRange, TauOutOfRange
from .model import QueryInterval, UncertainPoint, interval_probability


def brute_all(points: Sequence[UncertainPoint], I: QueryInterval) -> list[tuple[int, float]]:
    """Every (id, probability), by probability descending then id."""
    items = [(p.id, interval_probability(p, I)) for p in points]
    items.sort(key=lambda t: (-t[1], t[0]))
    return items


def brute_top1(points: Sequence[UncertainPoint], I: QueryInterval) -> tuple[int, float]:
    return brute_topk(points, I, 1)[0]


def brute_topk(points: Sequence[UncertainPoint], I: QueryInterval, k: int) -> list[tuple[int, float]]:
    if not 1 <= k <= len(points):
        raise KOutOfRange(f"k={k} outside [1, {len(points)}]")
    return brute_all(points, I)[:k]


def brute_threshold(points: Sequence[UncertainPoint], I: QueryInterval, tau: float) -> list[tuple[int, float]]:
    if not 0.0 <= tau <= 1.0:
        raise TauOutOfRange(f"tau={tau} outside [0, 1]")
    return [t for t in brute_all(points, I) if t[1] >= tau]
