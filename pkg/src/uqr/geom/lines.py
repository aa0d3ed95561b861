"""Lines, upper envelopes of lines and segments."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from ..counters import Counters
from ..errors import EmptyInput, VerticalSegment


@dataclass(frozen=True)
class Line:
    """A line y = slope*x + intercept owned by (owner, tag).

    When `anchor` is set, heights come from `anchor.raw(x)` (optionally
    mirrored to 1 - raw) so they match the model's cdf evaluation bit
    for bit; slope and intercept are then only used for geometry.
    """

    slope: float
    intercept: float
    owner: int = -1
    tag: int = 0
    anchor: Any = None
    flip: bool = False
    shape: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # lines with equal shape have identical heights everywhere; only
        # the fields the height evaluation reads take part
        a = self.anchor
        if a is None:
            key = None
        elif a.rise == 0.0:
            key = (a.y0,)
        else:
            key = (a.lo, a.y0, a.rise, a.run)
        object.__setattr__(self, "shape", (self.slope, self.intercept, self.flip, key))

    def at(self, x: float) -> float:
        if self.anchor is None:
            return self.slope * x + self.intercept
        v = self.anchor.raw(x)
        return 1.0 - v if self.flip else v


def line_from_piece(piece, owner: int, tag: int = 0, flip: bool = False) -> Line:
    slope, intercept = piece.slope, piece.intercept
    if flip:
        slope, intercept = -slope, 1.0 - intercept
    return Line(slope, intercept, owner, tag, piece, flip)


def crossing_x(l1: Line, l2: Line) -> float:
    return (l1.intercept - l2.intercept) / (l2.slope - l1.slope)


# error bound factor for the float orientation test (a few ulps)
_FILTER_EPS = 1e-14


def _removable(l1: Line, l2: Line, l3: Line) -> bool:
    """True if l2 is nowhere strictly above max(l1, l3); slopes ascend."""
    lhs = (l1.intercept - l3.intercept) * (l2.slope - l1.slope)
    rhs = (l1.intercept - l2.intercept) * (l3.slope - l1.slope)
    bound = _FILTER_EPS * (
        (abs(l1.intercept) + abs(l3.intercept)) * (abs(l2.slope) + abs(l1.slope))
        + (abs(l1.intercept) + abs(l2.intercept)) * (abs(l3.slope) + abs(l1.slope))
    )
    if abs(lhs - rhs) > bound:
        return lhs <= rhs
    # near-degenerate: decide exactly on the float coefficients so the
    # answer does not depend on which builder asks
    a1, b1 = Fraction(l1.slope), Fraction(l1.intercept)
    a2, b2 = Fraction(l2.slope), Fraction(l2.intercept)
    a3, b3 = Fraction(l3.slope), Fraction(l3.intercept)
    return (b1 - b3) * (a2 - a1) <= (b1 - b2) * (a3 - a1)


@dataclass
class EnvelopeChain:
    """Upper envelope of lines, left to right.

    `groups[i]` holds the lines sharing entry i (identical shape,
    smallest owner first); `breaks[i]` is where entry i hands over to
    entry i+1.  `flat` lists every line entry by entry, so walking the
    chain one line at a time is a walk over `flat`.
    """

    groups: list[tuple[Line, ...]]
    breaks: list[float]
    flat: list[Line] = field(init=False)
    start: list[int] = field(init=False)
    entry_of: list[int] = field(init=False)

    def __post_init__(self):
        self.flat, self.start, self.entry_of = [], [], []
        for e, g in enumerate(self.groups):
            self.start.append(len(self.flat))
            self.flat.extend(g)
            self.entry_of.extend([e] * len(g))

    def __len__(self) -> int:
        return len(self.groups)

    @property
    def lines(self) -> list[Line]:
        return [g[0] for g in self.groups]

    def height(self, e: int, x: float) -> float:
        return self.groups[e][0].at(x)

    def refine(self, e: int, x: float, counters: Optional[Counters] = None) -> int:
        """Move from entry e to a neighbour while it is strictly higher at x.

        Breakpoints are rounded, so a breakpoint search can land one entry
        off near a crossing; this settles on an entry of maximal height.
        """
        n = len(self.groups)
        h = self.height(e, x)
        steps = 0
        while e + 1 < n:
            h2 = self.height(e + 1, x)
            steps += 1
            if h2 > h:
                e, h = e + 1, h2
            else:
                break
        while e > 0:
            h2 = self.height(e - 1, x)
            steps += 1
            if h2 > h:
                e, h = e - 1, h2
            else:
                break
        if counters is not None:
            counters.comparisons += steps
        return e

    def locate(self, x: float, counters: Optional[Counters] = None) -> int:
        """Entry attaining the envelope at x (binary search plus refine)."""
        lo, hi = 0, len(self.breaks)
        probes = 0
        while lo < hi:
            mid = (lo + hi) // 2
            probes += 1
            if self.breaks[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        if counters is not None:
            counters.comparisons += probes
        return self.refine(lo, x, counters)

    def value(self, x: float) -> float:
        return self.height(self.locate(x), x)


def group_lines(lines: Sequence[Line]) -> list[tuple[Line, ...]]:
    """Group identical lines, sorted by slope asc, intercept desc, owner."""
    buckets: dict[tuple, list[Line]] = {}
    for ln in lines:
        if not (math.isfinite(ln.slope) and math.isfinite(ln.intercept)):
            raise ValueError(f"line coefficients must be finite: {ln}")
        buckets.setdefault(ln.shape, []).append(ln)
    groups = [tuple(sorted(b, key=lambda l: (l.owner, l.tag))) for b in buckets.values()]
    groups.sort(key=lambda g: (g[0].slope, -g[0].intercept, g[0].owner, g[0].tag))
    return groups


def hull_pass(groups: list[tuple[Line, ...]]) -> tuple[list[int], list[float]]:
    """One upper-envelope pass over groups sorted by `group_lines` order.

    Returns the indices of the groups on the envelope (left to right)
    and the breakpoints between them.
    """
    stack: list[int] = []
    sa: list[float] = []  # slopes and intercepts along the stack
    sb: list[float] = []
    last_slope = None
    eps = _FILTER_EPS
    for i, g in enumerate(groups):
        ln = g[0]
        a3, b3 = ln.slope, ln.intercept
        if a3 == last_slope:
            continue
        last_slope = a3
        while len(stack) >= 2:
            a1, b1, a2, b2 = sa[-2], sb[-2], sa[-1], sb[-1]
            # inlined `_removable` float filter
            lhs = (b1 - b3) * (a2 - a1)
            rhs = (b1 - b2) * (a3 - a1)
            d = lhs - rhs
            m = (abs(b1) + abs(b2) + abs(b3)) * (abs(a1) + abs(a2) + abs(a3))
            if d > 2 * eps * m:
                break
            if d >= -2 * eps * m and not _removable(groups[stack[-2]][0], groups[stack[-1]][0], ln):
                break
            stack.pop()
            sa.pop()
            sb.pop()
        stack.append(i)
        sa.append(a3)
        sb.append(b3)
    breaks = []
    for a, b in zip(stack, stack[1:]):
        x = crossing_x(groups[a][0], groups[b][0])
        if breaks and x < breaks[-1]:
            x = breaks[-1]
        breaks.append(x)
    return stack, breaks


def upper_envelope_lines(lines: Sequence[Line]) -> EnvelopeChain:
    if not lines:
        raise EmptyInput("upper envelope of no lines")
    groups = group_lines(lines)
    keep, breaks = hull_pass(groups)
    return EnvelopeChain([groups[i] for i in keep], breaks)


@dataclass(frozen=True)
class Segment:
    """The part of `line` over the half-open x-range [x0, x1)."""

    x0: float
    x1: float
    line: Line

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise VerticalSegment(f"segment needs x0 < x1, got [{self.x0}, {self.x1})")


@dataclass
class SegmentEnvelope:
    """Upper envelope of segments as disjoint half-open pieces [xs[i], xe[i])."""

    xs: list[float]
    xe: list[float]
    lines: list[Line]

    def locate(self, x: float, counters: Optional[Counters] = None) -> Optional[int]:
        i = bisect_right(self.xs, x) - 1
        if counters is not None:
            counters.comparisons += max(1, len(self.xs).bit_length())
        if i < 0 or x >= self.xe[i]:
            return None
        return i

    def value(self, x: float) -> Optional[float]:
        i = self.locate(x)
        return None if i is None else self.lines[i].at(x)


def _merge_envelopes(a: SegmentEnvelope, b: SegmentEnvelope) -> SegmentEnvelope:
    cuts = sorted(set(a.xs) | set(a.xe) | set(b.xs) | set(b.xe))
    out = SegmentEnvelope([], [], [])

    def emit(x0: float, x1: float, ln: Line) -> None:
        if not x0 < x1:
            return
        if out.lines and out.lines[-1] is ln and out.xe[-1] == x0:
            out.xe[-1] = x1
        else:
            out.xs.append(x0)
            out.xe.append(x1)
            out.lines.append(ln)

    ia = ib = 0
    for x0, x1 in zip(cuts, cuts[1:]):
        while ia < len(a.xs) and a.xe[ia] <= x0:
            ia += 1
        while ib < len(b.xs) and b.xe[ib] <= x0:
            ib += 1
        la = a.lines[ia] if ia < len(a.xs) and a.xs[ia] <= x0 else None
        lb = b.lines[ib] if ib < len(b.xs) and b.xs[ib] <= x0 else None
        if la is None and lb is None:
            continue
        if la is None or lb is None:
            emit(x0, x1, la or lb)
            continue
        if la.slope == lb.slope:
            top = la if (la.intercept, -la.owner) >= (lb.intercept, -lb.owner) else lb
            emit(x0, x1, top)
            continue
        xc = crossing_x(la, lb)
        # the steeper line wins to the right of the crossing
        lo_line, hi_line = (la, lb) if la.slope < lb.slope else (lb, la)
        if xc <= x0:
            emit(x0, x1, hi_line)
        elif xc >= x1:
            emit(x0, x1, lo_line)
        else:
            emit(x0, xc, lo_line)
            emit(xc, x1, hi_line)
    return out


def upper_envelope_segments(segments: Sequence[Segment]) -> SegmentEnvelope:
    """Divide-and-conquer upper envelope of half-open segments."""
    if not segments:
        raise EmptyInput("upper envelope of no segments")

    def build(lo: int, hi: int) -> SegmentEnvelope:
        if hi - lo == 1:
            s = segments[lo]
            return SegmentEnvelope([s.x0], [s.x1], [s.line])
        mid = (lo + hi) // 2
        return _merge_envelopes(build(lo, mid), build(mid, hi))

    return build(0, len(segments))
