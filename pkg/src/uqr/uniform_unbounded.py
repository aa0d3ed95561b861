"""Uniform pdfs, queries with one infinite side.

For I = (-inf, x] the probability of p is its cdf at x, which on the
support is the line (x - lo) / w; for I = [x, +inf) it is the mirrored
line (hi - x) / w.  Ranking points is then ranking lines at x, clamped
to [0, 1], which the layered half-plane index does directly.
"""

from __future__ import annotations

from typing import Sequence

from .counters import Counters
from .errors import BoundedInterval, NonUniformPoint
from .geom.lines import Line, line_from_piece
from .halfplane import LayeredHalfplaneIndex, report_above, topk_block, topk_heap, topk_select
from .model import INF, CdfPiece, QueryInterval, UncertainPoint, UniformPdf
from .query import IndexBase


def left_line(p: UncertainPoint) -> Line:
    """x -> (x - lo) / w, the cdf on the support."""
    pdf = p.pdf
    return line_from_piece(CdfPiece(pdf.lo, pdf.hi, 0.0, 1.0, pdf.width), p.id)


def right_line(p: UncertainPoint) -> Line:
    """x -> (hi - x) / w, the mass to the right of x on the support."""
    pdf = p.pdf
    return line_from_piece(CdfPiece(pdf.hi, INF, 0.0, -1.0, pdf.width), p.id)


ENGINES = {"heap": topk_heap, "select": topk_select, "block": topk_block}


class UniformUnboundedIndex(IndexBase):
    engines = ("heap", "select", "block")
    default_engine = "select"

    def __init__(self, points: Sequence[UncertainPoint]):
        for p in points:
            if not isinstance(p.pdf, UniformPdf):
                raise NonUniformPoint(f"point {p.id} is not uniform")
        super().__init__(points)
        self.left = LayeredHalfplaneIndex.build([left_line(p) for p in points])
        self.right = LayeredHalfplaneIndex.build([right_line(p) for p in points])

    def _check_interval(self, I: QueryInterval) -> None:
        if I.bounded:
            raise BoundedInterval("this index answers intervals with an infinite side")

    def _side(self, I: QueryInterval) -> tuple[LayeredHalfplaneIndex, float]:
        if I.lo == -INF:
            return self.left, I.hi
        return self.right, I.lo

    def _top1_id(self, I: QueryInterval, cnt: Counters) -> int:
        index, x = self._side(I)
        chain = index.layers[0]
        return chain.groups[chain.locate(x, cnt)][0].owner

    def _topk_ids(self, I: QueryInterval, k: int, engine: str, cnt: Counters) -> list[int]:
        index, x = self._side(I)
        return [h.owner for h in ENGINES[engine](index, x, k, cnt)]

    def _threshold_ids(self, I: QueryInterval, tau: float, cnt: Counters) -> list[int]:
        index, x = self._side(I)
        return [ln.owner for ln in report_above(index, x, tau, cnt)]
