"""Histogram pdfs, queries with one infinite side.

For I = (-inf, x] the probability of p is F_p(x) and for I = [x, +inf)
it is 1 - F_p(x).  Each cdf is a chain of linear pieces, so a point
contributes exactly one piece at any x.  The pieces go into a segment
tree over the elementary intervals of all breakpoints; the nodes on the
root-to-leaf path of x then hold exactly one piece per point, each in
a layered half-plane index cascaded along the tree.  Top-1 reads the
upper envelope of all pieces (as segments) at x.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Sequence

from .counters import Counters
from .errors import BoundedInterval
from .geom.lines import Line, Segment, SegmentEnvelope, line_from_piece, upper_envelope_segments
from .halfplane import report_above, topk_block, topk_heap
from .model import INF, QueryInterval, UncertainPoint, as_histogram
from .query import IndexBase
from .trees import LayeredTree, RangeShape

ENGINES = {"heap": topk_heap, "block": topk_block}


class PieceTree:
    """Segment tree of cdf pieces over elementary intervals.

    With breakpoints e_0 < ... < e_m the leaves are (-inf, e_0),
    [e_0, e_1), ..., [e_m, +inf), so infinite rays need no clamping.
    """

    def __init__(self, points: Sequence[UncertainPoint], flip: bool):
        self.edges = sorted({b for p in points for b in p.cdf.breaks})
        self.shape = RangeShape(len(self.edges) + 1)
        node_lines: list[list[Line]] = [[] for _ in range(len(self.shape))]
        segments = []
        for p in points:
            for tag, piece in enumerate(p.cdf.pieces):
                ln = line_from_piece(piece, p.id, tag, flip)
                a = 0 if piece.lo == -INF else bisect_left(self.edges, piece.lo) + 1
                b = len(self.edges) + 1 if piece.hi == INF else bisect_left(self.edges, piece.hi) + 1
                for v in self.shape.canonical(a, b):
                    node_lines[v].append(ln)
                segments.append(Segment(piece.lo, piece.hi, ln))
        self.tree = LayeredTree(self.shape, node_lines)
        self.envelope: SegmentEnvelope = upper_envelope_segments(segments)

    def leaf(self, x: float) -> int:
        return bisect_right(self.edges, x)

    def sources(self, x: float, cnt: Counters):
        cnt.comparisons += max(1, len(self.edges).bit_length())
        return self.tree.path_sources(self.leaf(x), x, cnt)


class HistogramUnboundedIndex(IndexBase):
    engines = ("heap", "block")
    default_engine = "heap"

    def __init__(self, points: Sequence[UncertainPoint]):
        # uniform points join as one-piece histograms so both sides share one cdf form
        points = [as_histogram(p) for p in points]
        super().__init__(points)
        self.left = PieceTree(points, flip=False)
        self.right = PieceTree(points, flip=True)

    def _check_interval(self, I: QueryInterval) -> None:
        if I.bounded:
            raise BoundedInterval("this index answers intervals with an infinite side")

    def _side(self, I: QueryInterval) -> tuple[PieceTree, float]:
        if I.lo == -INF:
            return self.left, I.hi
        return self.right, I.lo

    def _top1_id(self, I: QueryInterval, cnt: Counters) -> int:
        tree, x = self._side(I)
        i = tree.envelope.locate(x, cnt)
        if i is None:
            return self.ids[0]
        return tree.envelope.lines[i].owner

    def _topk_ids(self, I: QueryInterval, k: int, engine: str, cnt: Counters) -> list[int]:
        tree, x = self._side(I)
        return [h.owner for h in ENGINES[engine](tree.sources(x, cnt), x, k, cnt)]

    def _threshold_ids(self, I: QueryInterval, tau: float, cnt: Counters) -> list[int]:
        tree, x = self._side(I)
        return [ln.owner for ln in report_above(tree.sources(x, cnt), x, tau, cnt)]
