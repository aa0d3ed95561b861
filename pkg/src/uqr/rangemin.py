"""Range-minimum structures used for ordered iteration.

`RangeMinIterator` lists the positions of a subrange in increasing key
order, lazily: a sparse table answers range minima and a heap splits
the range around each reported position, so each item costs O(log n).
`ContainmentIds` builds on it to iterate, in increasing id order, the
items (a, b, id) with a <= qa and b >= qb.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
from typing import Any, Iterator, Sequence

import numpy as np


class RangeMinIterator:
    def __init__(self, keys: Sequence[Any]):
        n = len(keys)
        order = sorted(range(n), key=keys.__getitem__)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        self.pos_of_rank = order
        self.table: list[list[int]] = []
        row = rank
        span = 1
        while True:
            self.table.append(row.tolist())
            if 2 * span > n:
                break
            row = np.minimum(row[: n - 2 * span + 1], row[span : n - span + 1])
            span *= 2
        self.n = n

    def __len__(self) -> int:
        return self.n

    def min_rank(self, lo: int, hi: int) -> int:
        j = (hi - lo).bit_length() - 1
        row = self.table[j]
        a, b = row[lo], row[hi - (1 << j)]
        return a if a < b else b

    def argmin(self, lo: int, hi: int) -> int:
        return self.pos_of_rank[self.min_rank(lo, hi)]

    def iterate(self, lo: int, hi: int) -> Iterator[int]:
        """Positions in [lo, hi) in increasing key order."""
        if lo >= hi:
            return
        heap = [(self.min_rank(lo, hi), lo, hi)]
        while heap:
            r, a, b = heapq.heappop(heap)
            p = self.pos_of_rank[r]
            yield p
            if a < p:
                heapq.heappush(heap, (self.min_rank(a, p), a, p))
            if p + 1 < b:
                heapq.heappush(heap, (self.min_rank(p + 1, b), p + 1, b))


class _Node:
    __slots__ = ("neg_b", "ids", "rmq")

    def __init__(self, items: list[tuple[float, float, int]]):
        items = sorted(items, key=lambda t: -t[1])
        self.neg_b = [-t[1] for t in items]
        self.ids = [t[2] for t in items]
        self.rmq = RangeMinIterator(self.ids)


class ContainmentIds:
    """Iterate ids of items with a <= qa and b >= qb in increasing id order.

    A range tree over a; each canonical node keeps its items sorted by b
    descending, so the qualifying items of a node form a prefix.  Nodes
    are built on first use, so one-sided queries only pay for the root.
    """

    def __init__(self, items: Sequence[tuple[float, float, int]]):
        self.items = sorted(items, key=lambda t: (t[0], t[2]))
        self.a = [t[0] for t in self.items]
        self._nodes: dict[tuple[int, int], _Node] = {}

    def __len__(self) -> int:
        return len(self.items)

    def _node(self, lo: int, hi: int) -> _Node:
        nd = self._nodes.get((lo, hi))
        if nd is None:
            nd = _Node(self.items[lo:hi])
            self._nodes[(lo, hi)] = nd
        return nd

    def _prefix_nodes(self, j: int) -> list[tuple[int, int]]:
        out = []
        lo, hi = 0, len(self.items)
        while j > lo and hi > lo:
            if j >= hi:
                out.append((lo, hi))
                break
            mid = (lo + hi) // 2
            if j >= mid:
                out.append((lo, mid))
                lo = mid
            else:
                hi = mid
        return out

    def iter_ids(self, qa: float, qb: float) -> Iterator[int]:
        j = bisect_right(self.a, qa)
        heap = []
        for lo, hi in self._prefix_nodes(j):
            nd = self._node(lo, hi)
            t = bisect_right(nd.neg_b, -qb)
            if t > 0:
                p = nd.rmq.argmin(0, t)
                heap.append((nd.ids[p], p, 0, t, nd))
        heapq.heapify(heap)
        while heap:
            i, p, a, b, nd = heapq.heappop(heap)
            yield i
            if a < p:
                q = nd.rmq.argmin(a, p)
                heapq.heappush(heap, (nd.ids[q], q, a, p, nd))
            if p + 1 < b:
                q = nd.rmq.argmin(p + 1, b)
                heapq.heappush(heap, (nd.ids[q], q, p + 1, b, nd))


class DominanceMin:
    """Minimum (w, id) over items with a < qa and b > qb (strict quadrant).

    Range tree over a with per-node lists sorted by b descending carrying
    prefix minima, so a query inspects O(log n) nodes with one binary
    search each.
    """

    def __init__(self, items: Sequence[tuple[float, float, float, int]]):
        self.items = sorted(items, key=lambda t: (t[0], t[3]))
        self.a = [t[0] for t in self.items]
        self.n = len(self.items)
        self._neg_b: dict[tuple[int, int], list[float]] = {}
        self._pmin: dict[tuple[int, int], list[tuple[float, int]]] = {}
        if self.n:
            self._build(0, self.n)

    def _build(self, lo: int, hi: int) -> list[tuple[float, float, int]]:
        if hi - lo == 1:
            _, b, w, i = self.items[lo]
            merged = [(b, w, i)]
        else:
            mid = (lo + hi) // 2
            left, right = self._build(lo, mid), self._build(mid, hi)
            merged = list(heapq.merge(left, right, key=lambda t: (-t[0], t[2])))
        self._neg_b[(lo, hi)] = [-t[0] for t in merged]
        pm, best = [], None
        for _, w, i in merged:
            if best is None or (w, i) < best:
                best = (w, i)
            pm.append(best)
        self._pmin[(lo, hi)] = pm
        return merged

    def query(self, qa: float, qb: float, counters=None) -> tuple[float, int] | None:
        j = bisect_left(self.a, qa)
        best = None
        lo, hi = 0, self.n
        nodes = []
        while j > lo and hi > lo:
            if j >= hi:
                nodes.append((lo, hi))
                break
            mid = (lo + hi) // 2
            if j >= mid:
                nodes.append((lo, mid))
                lo = mid
            else:
                hi = mid
        for key in nodes:
            neg_b = self._neg_b[key]
            t = bisect_left(neg_b, -qb)
            if counters is not None:
                counters.comparisons += max(1, len(neg_b).bit_length())
            if t > 0:
                cand = self._pmin[key][t - 1]
                if best is None or cand < best:
                    best = cand
        return best
