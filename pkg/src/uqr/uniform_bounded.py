"""Uniform pdfs, bounded query intervals.

Relative to I = [x_l, x_r] a point with support [lo, hi] is

* L-type when x_l <= lo: its probability is the cdf line at x_r;
* R-type when x_r >= hi: its probability is the mirrored line at x_l;
* M-type otherwise (lo < x_l and x_r < hi): probability (x_r - x_l) / w.

L-type points form a suffix of the points sorted by lo, R-type points
a prefix of the points sorted by hi, and M-type points a dominance
quadrant.  Top-1 uses persistent envelopes over those suffixes and
prefixes plus a dominance-minimum tree; top-k and threshold use trees
of layered half-plane indexes (T_L, T_R) and a tree of range-minimum
iterators ordered by width (T_M).
"""

from __future__ import annotations

import heapq
import itertools
from bisect import bisect_left, bisect_right
from typing import Iterator, Optional, Sequence

from .counters import Counters, check, debug_enabled
from .errors import NonUniformPoint, UnboundedInterval
from .geom.lines import upper_envelope_lines
from .geom.persistent import PersistentEnvelope
from .halfplane import (
    SortedStream,
    block_heap_topk,
    block_size,
    report_above,
    topk_block,
    topk_heap,
)
from .model import QueryInterval, UncertainPoint, UniformPdf
from .query import IndexBase
from .rangemin import DominanceMin, RangeMinIterator
from .trees import LayeredTree, RangeShape
from .uniform_unbounded import left_line, right_line

# exhaustive version-vs-rebuild checks run at build time up to this size
EXHAUSTIVE_CHECK_N = 64


class WidthTree:
    """T_M: tree over points sorted by lo; iterate qualifying points by width.

    Node v keeps its points sorted by hi descending, so the points with
    hi > x_r form a prefix, and a range-minimum iterator over (w, id)
    lists that prefix in increasing width.
    """

    def __init__(self, pts: Sequence[UncertainPoint]):
        self.pts = sorted(pts, key=lambda p: (p.pdf.lo, p.id))
        self.lo = [p.pdf.lo for p in self.pts]
        self.shape = RangeShape(len(self.pts))
        self._nodes: dict[int, tuple[list[float], list[UncertainPoint], RangeMinIterator]] = {}

    def _node(self, v: int):
        nd = self._nodes.get(v)
        if nd is None:
            members = sorted(self.pts[self.shape.lo[v] : self.shape.hi[v]], key=lambda p: (-p.pdf.hi, p.id))
            neg_hi = [-p.pdf.hi for p in members]
            rmq = RangeMinIterator([(p.pdf.width, p.id) for p in members])
            nd = (neg_hi, members, rmq)
            self._nodes[v] = nd
        return nd

    def streams(self, x_l: float, x_r: float, cnt: Optional[Counters] = None) -> list[Iterator[UncertainPoint]]:
        """Per canonical node, an iterator of M-type points by width ascending."""
        j = bisect_left(self.lo, x_l)
        out = []
        for v in self.shape.canonical(0, j):
            neg_hi, members, rmq = self._node(v)
            t = bisect_left(neg_hi, -x_r)
            if cnt is not None:
                cnt.comparisons += max(1, len(neg_hi).bit_length())
            if t > 0:
                out.append(_by_position(members, rmq.iterate(0, t)))
        return out


def _by_position(members: list, positions: Iterator[int]) -> Iterator[UncertainPoint]:
    for q in positions:
        yield members[q]


def _materialize(it: Iterator, x_l: float, x_r: float, limit: int, cnt: Counters) -> SortedStream:
    seen: list[float] = []
    pts: list[UncertainPoint] = []

    def fetch(t: int) -> float:
        while len(seen) <= t:
            p = next(it)
            pts.append(p)
            seen.append((x_r - x_l) / p.pdf.width)
        return seen[t]

    s = SortedStream(fetch, limit, cnt)
    s.points = pts  # type: ignore[attr-defined]
    return s


class UniformBoundedIndex(IndexBase):
    engines = ("heap", "block")
    default_engine = "heap"
    bounded = True

    def __init__(self, points: Sequence[UncertainPoint]):
        for p in points:
            if not isinstance(p.pdf, UniformPdf):
                raise NonUniformPoint(f"point {p.id} is not uniform")
        super().__init__(points)
        by_lo = sorted(points, key=lambda p: (p.pdf.lo, p.id))
        by_hi = sorted(points, key=lambda p: (p.pdf.hi, p.id))
        self.lo_sorted = [p.pdf.lo for p in by_lo]
        self.hi_sorted = [p.pdf.hi for p in by_hi]
        # version v of lenv: envelope of the last v points by lo
        self.lenv = PersistentEnvelope(seed=1)
        for p in reversed(by_lo):
            self.lenv.insert(left_line(p))
        # version v of renv: envelope of the first v points by hi
        self.renv = PersistentEnvelope(seed=2)
        for p in by_hi:
            self.renv.insert(right_line(p))
        self.dom = DominanceMin([(p.pdf.lo, p.pdf.hi, p.pdf.width, p.id) for p in points])
        lshape = RangeShape(len(by_lo))
        self.tl = LayeredTree(lshape, [[left_line(p) for p in by_lo[lshape.lo[v] : lshape.hi[v]]] for v in range(len(lshape))])
        rshape = RangeShape(len(by_hi))
        self.tr = LayeredTree(rshape, [[right_line(p) for p in by_hi[rshape.lo[v] : rshape.hi[v]]] for v in range(len(rshape))])
        self.tm = WidthTree(points)
        if debug_enabled() and self.n <= EXHAUSTIVE_CHECK_N:
            self.check_versions(by_lo, by_hi)

    def check_versions(self, by_lo, by_hi) -> None:
        """Every persistent version equals a freshly built envelope."""
        n = self.n
        for v in range(1, n + 1):
            got = [ln.shape for ln in PersistentEnvelope.lines(self.lenv.versions[v])]
            ref = [ln.shape for ln in upper_envelope_lines([left_line(p) for p in by_lo[n - v :]]).lines]
            check(got == ref, f"left envelope version {v} differs from rebuild")
            got = [ln.shape for ln in PersistentEnvelope.lines(self.renv.versions[v])]
            ref = [ln.shape for ln in upper_envelope_lines([right_line(p) for p in by_hi[:v]]).lines]
            check(got == ref, f"right envelope version {v} differs from rebuild")

    def _check_interval(self, I: QueryInterval) -> None:
        if not I.bounded:
            raise UnboundedInterval("this index answers bounded intervals")

    def _ranges(self, I: QueryInterval) -> tuple[int, int]:
        """Start of the L-type suffix (by lo) and end of the R-type prefix (by hi)."""
        return bisect_left(self.lo_sorted, I.lo), bisect_right(self.hi_sorted, I.hi)

    def _top1_id(self, I: QueryInterval, cnt: Counters) -> int:
        j, r = self._ranges(I)
        cands = []
        ln = self.lenv.query(self.n - j, I.hi, cnt)
        if ln is not None:
            cands.append(ln.owner)
        ln = self.renv.query(r, I.lo, cnt)
        if ln is not None:
            cands.append(ln.owner)
        m = self.dom.query(I.lo, I.hi, cnt)
        if m is not None:
            cands.append(m[1])
        return min(cands, key=lambda i: (-self.prob(i, I), i))

    def _structures(self, I: QueryInterval, cnt: Counters):
        j, r = self._ranges(I)
        lsrc = self.tl.range_sources(j, self.n, I.hi, cnt)
        rsrc = self.tr.range_sources(0, r, I.lo, cnt)
        return lsrc, rsrc

    def _topk_ids(self, I: QueryInterval, k: int, engine: str, cnt: Counters) -> list[int]:
        lsrc, rsrc = self._structures(I, cnt)
        ids: list[int] = []
        for src, x in ((lsrc, I.hi), (rsrc, I.lo)):
            if not src:
                continue
            kk = min(k, sum(len(ix) for ix, _ in src))
            eng = topk_block if engine == "block" else topk_heap
            ids.extend(h.owner for h in eng(src, x, kk, cnt))
        streams = self.tm.streams(I.lo, I.hi, cnt)
        if engine == "block":
            ss = [_materialize(it, I.lo, I.hi, k, cnt) for it in streams]
            ss = [s for s in ss if _has(s)]
            total = sum(_available(s, k) for s in ss)
            if total:
                res = block_heap_topk(ss, min(k, total), block_size(self.n), cnt)
                ids.extend(ss[si].points[t].id for _, si, t in res.items)
        else:
            merged = heapq.merge(*streams, key=lambda p: (p.pdf.width, p.id))
            for p in itertools.islice(merged, k):
                cnt.comparisons += max(1, len(streams).bit_length())
                ids.append(p.id)
        return ids

    def _threshold_ids(self, I: QueryInterval, tau: float, cnt: Counters) -> list[int]:
        lsrc, rsrc = self._structures(I, cnt)
        ids = [ln.owner for ln in report_above(lsrc, I.hi, tau, cnt)]
        ids += [ln.owner for ln in report_above(rsrc, I.lo, tau, cnt)]
        span = I.hi - I.lo
        for it in self.tm.streams(I.lo, I.hi, cnt):
            for p in it:
                cnt.comparisons += 1
                if span / p.pdf.width < tau:
                    break
                ids.append(p.id)
        seen = set()
        out = []
        for i in ids:
            if i not in seen:
                seen.add(i)
                out.append(i)
        cnt.reported += len(out)
        return out


def _has(s: SortedStream) -> bool:
    try:
        s.get(0)
    except StopIteration:
        return False
    return True


def _available(s: SortedStream, k: int) -> int:
    """Length of the stream capped at k, fixing the length once known."""
    n = 0
    while n < k:
        try:
            s.get(n)
        except StopIteration:
            break
        n += 1
    s.length = n
    return n
