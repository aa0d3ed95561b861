"""Uncertain points on the real line: pdfs, cdfs and interval probabilities.

Every probability in the library is produced by the evaluation code in
this module.  Index structures build their lines and planes from the
same `CdfPiece` anchors, so a height computed by an index and the
probability computed here are the same floating-point expression.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import (
    InvalidInterval,
    InvalidPdf,
    MassNotOne,
    NonAscendingBreaks,
    NotUniform,
    UnboundedInterval,
)

INF = math.inf
MAX_PIECES = 16
MASS_TOLERANCE = 1e-9


def clamp01(v: float) -> float:
    if v <= 0.0:
        return 0.0
    if v >= 1.0:
        return 1.0
    return v


@dataclass(frozen=True)
class UniformPdf:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidPdf(f"uniform bounds must be finite: [{lo}, {hi}]")
        if not lo < hi:
            raise InvalidPdf(f"uniform pdf needs lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class HistogramPdf:
    """Piecewise-constant pdf.

    `breaks` are x_1..x_{c-1}; `densities[i]` is the density on
    [breaks[i], breaks[i+1]).  The two unbounded pieces have density 0.
    """

    breaks: tuple[float, ...]
    densities: tuple[float, ...]
    max_pieces: int = field(default=MAX_PIECES, compare=False, repr=False)

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        dens = tuple(float(d) for d in self.densities)
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "densities", dens)
        if len(breaks) < 2:
            raise InvalidPdf("a histogram needs at least one bounded piece")
        if len(dens) != len(breaks) - 1:
            raise InvalidPdf(
                f"{len(breaks)} breaks need {len(breaks) - 1} densities, got {len(dens)}"
            )
        if len(breaks) + 1 > self.max_pieces:
            raise InvalidPdf(f"{len(breaks) + 1} pieces exceed the maximum {self.max_pieces}")
        if not all(math.isfinite(b) for b in breaks):
            raise InvalidPdf("breaks must be finite")
        for a, b in zip(breaks, breaks[1:]):
            if not a < b:
                raise NonAscendingBreaks(f"breaks not strictly ascending at {a}, {b}")
        for d in dens:
            if not (math.isfinite(d) and d >= 0.0):
                raise InvalidPdf(f"density must be finite and non-negative, got {d}")
        mass = math.fsum(d * (b - a) for d, a, b in zip(dens, breaks, breaks[1:]))
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise MassNotOne(f"total mass {mass!r} is not 1")

    @property
    def pieces(self) -> int:
        return len(self.breaks) + 1


Pdf = Union[UniformPdf, HistogramPdf]


@dataclass(frozen=True)
class CdfPiece:
    """One linear piece of a cdf on [lo, hi).

    The value is `y0 + rise * (x - lo) / run`, or just `y0` when the
    piece is flat.  Keeping the anchor form (instead of slope and
    intercept) makes the value at a breakpoint bit-identical to the
    next piece's `y0`.
    """

    lo: float
    hi: float
    y0: float
    rise: float
    run: float = 1.0

    def raw(self, x: float) -> float:
        if self.rise == 0.0:
            return self.y0
        return self.y0 + self.rise * (x - self.lo) / self.run

    def value(self, x: float) -> float:
        return clamp01(self.raw(x))

    @property
    def slope(self) -> float:
        return self.rise / self.run

    @property
    def intercept(self) -> float:
        if self.rise == 0.0:
            return self.y0
        return self.y0 - self.slope * self.lo


@dataclass(frozen=True)
class Cdf:
    pieces: tuple[CdfPiece, ...]
    starts: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "starts", tuple(p.lo for p in self.pieces))

    def piece_index(self, x: float) -> int:
        return bisect_right(self.starts, x) - 1

    def __call__(self, x: float) -> float:
        return self.pieces[self.piece_index(x)].value(x)

    @property
    def breaks(self) -> tuple[float, ...]:
        return self.starts[1:]


def cdf_from_pdf(pdf: Pdf) -> Cdf:
    if isinstance(pdf, UniformPdf):
        return Cdf(
            (
                CdfPiece(-INF, pdf.lo, 0.0, 0.0),
                CdfPiece(pdf.lo, pdf.hi, 0.0, 1.0, pdf.width),
                CdfPiece(pdf.hi, INF, 1.0, 0.0),
            )
        )
    if not isinstance(pdf, HistogramPdf):
        raise InvalidPdf(f"unsupported pdf {pdf!r}")
    b, d = pdf.breaks, pdf.densities
    last_pos = max(i for i, v in enumerate(d) if v > 0.0)
    pieces = [CdfPiece(-INF, b[0], 0.0, 0.0)]
    acc = 0.0
    for i, dens in enumerate(d):
        piece = CdfPiece(b[i], b[i + 1], acc, dens)
        pieces.append(piece)
        # the next anchor is computed with the piece's own expression so
        # consecutive pieces meet exactly
        acc = 1.0 if i >= last_pos else piece.raw(b[i + 1])
    pieces.append(CdfPiece(b[-1], INF, 1.0, 0.0))
    return Cdf(tuple(pieces))


@dataclass(frozen=True)
class UncertainPoint:
    id: int
    pdf: Pdf
    cdf: Cdf = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "cdf", cdf_from_pdf(self.pdf))

    @property
    def is_uniform(self) -> bool:
        return isinstance(self.pdf, UniformPdf)

    def support(self) -> tuple[float, float]:
        """Smallest closed interval holding all the mass."""
        if isinstance(self.pdf, UniformPdf):
            return self.pdf.lo, self.pdf.hi
        b, d = self.pdf.breaks, self.pdf.densities
        pos = [i for i, v in enumerate(d) if v > 0.0]
        return b[pos[0]], b[pos[-1] + 1]

    def flat_zones(self) -> list[tuple[float, float]]:
        """Maximal closed x-ranges on which the cdf is constant."""
        if isinstance(self.pdf, UniformPdf):
            return [(-INF, self.pdf.lo), (self.pdf.hi, INF)]
        zones = []
        start = -INF
        b, d = self.pdf.breaks, self.pdf.densities
        for i, dens in enumerate(d):
            if dens > 0.0:
                if start is not None:
                    zones.append((start, b[i]))
                    start = None
            elif start is None:
                start = b[i]
        zones.append((start if start is not None else b[-1], INF))
        return zones


@dataclass(frozen=True)
class QueryInterval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise InvalidInterval("interval bounds must not be NaN")
        if lo > hi:
            raise InvalidInterval(f"empty interval [{lo}, {hi}]")
        if lo == INF or hi == -INF:
            raise InvalidInterval(f"interval [{lo}, {hi}] lies at infinity")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


def interval_probability(p: UncertainPoint, I: QueryInterval) -> float:
    pdf = p.pdf
    if isinstance(pdf, UniformPdf):
        a = pdf.lo if I.lo < pdf.lo else I.lo
        b = pdf.hi if I.hi > pdf.hi else I.hi
        if b <= a:
            return 0.0
        return clamp01((b - a) / pdf.width)
    return clamp01(p.cdf(I.hi) - p.cdf(I.lo))


class PointType(Enum):
    L = "L"
    R = "R"
    M = "M"


def classify(p: UncertainPoint, I: QueryInterval) -> PointType:
    if not isinstance(p.pdf, UniformPdf):
        raise NotUniform(f"point {p.id} is not uniform")
    if not I.bounded:
        raise UnboundedInterval("classification needs a bounded interval")
    if I.lo <= p.pdf.lo:
        return PointType.L
    if I.hi >= p.pdf.hi:
        return PointType.R
    return PointType.M


def as_histogram(p: UncertainPoint) -> UncertainPoint:
    """The same point with its uniform pdf rewritten as a one-piece histogram."""
    if isinstance(p.pdf, HistogramPdf):
        return p
    return UncertainPoint(p.id, HistogramPdf((p.pdf.lo, p.pdf.hi), (1.0 / p.pdf.width,)))
