import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uqr.errors import (
    InvalidInterval,
    InvalidPdf,
    MassNotOne,
    NonAscendingBreaks,
    NotUniform,
    UnboundedInterval,
)
from uqr.model import (
    HistogramPdf,
    PointType,
    QueryInterval,
    UncertainPoint,
    UniformPdf,
    as_histogram,
    cdf_from_pdf,
    classify,
    interval_probability,
)

INF = math.inf


def test_uniform_cdf_pieces():
    F = cdf_from_pdf(UniformPdf(0, 2))
    assert [F(x) for x in (-1, 0, 1, 2, 5)] == [0.0, 0.0, 0.5, 1.0, 1.0]
    assert len(F.pieces) == 3


def test_histogram_cdf_values():
    F = cdf_from_pdf(HistogramPdf((0, 1, 3), (0.5, 0.25)))
    assert F(1) == 0.5
    assert F(3) == 1.0
    assert F(-5) == 0.0 and F(10) == 1.0


def test_one_piece_histogram_matches_uniform():
    h = cdf_from_pdf(HistogramPdf((0, 1), (1.0,)))
    u = cdf_from_pdf(UniformPdf(0, 1))
    for x in (-1, 0, 0.25, 0.5, 0.999, 1, 2):
        assert h(x) == u(x)


def test_cdf_pieces_meet_exactly_at_breaks():
    breaks = (0, 0.1, 0.7, 3.3)
    weights = (1.3, 0.7, 0.09)
    mass = math.fsum(w * (b - a) for w, a, b in zip(weights, breaks, breaks[1:]))
    F = cdf_from_pdf(HistogramPdf(breaks, tuple(w / mass for w in weights)))
    for left, right in zip(F.pieces, F.pieces[1:]):
        if math.isfinite(right.lo):
            assert left.raw(right.lo) == right.y0 or right.y0 == 1.0


def test_interval_probability_examples():
    u = UncertainPoint(1, UniformPdf(0, 2))
    h = UncertainPoint(2, HistogramPdf((0, 1, 3), (0.5, 0.25)))
    assert interval_probability(u, QueryInterval(0, 1)) == 0.5
    assert interval_probability(h, QueryInterval(0.5, 2)) == 0.5
    assert interval_probability(u, QueryInterval(-INF, 5)) == 1.0
    assert interval_probability(u, QueryInterval(-INF, INF)) == 1.0


def test_classify_examples():
    I = QueryInterval(1, 3)
    assert classify(UncertainPoint(1, UniformPdf(1, 3)), I) is PointType.L
    assert classify(UncertainPoint(1, UniformPdf(0, 2)), I) is PointType.R
    assert classify(UncertainPoint(1, UniformPdf(1, 5)), QueryInterval(3, 4)) is PointType.M


def test_classify_rejects_histograms_and_unbounded():
    with pytest.raises(NotUniform):
        classify(UncertainPoint(1, HistogramPdf((0, 1), (1.0,))), QueryInterval(0, 1))
    with pytest.raises(UnboundedInterval):
        classify(UncertainPoint(1, UniformPdf(0, 1)), QueryInterval(-INF, 1))


def test_validation_errors():
    with pytest.raises(MassNotOne):
        HistogramPdf((0, 1), (0.5,))
    with pytest.raises(NonAscendingBreaks):
        HistogramPdf((0, 1, 1), (0.5, 0.5))
    with pytest.raises(InvalidPdf):
        HistogramPdf((0, 1, 2), (1.0, -0.0000001))
    with pytest.raises(InvalidPdf):
        HistogramPdf(tuple(range(17)), (1 / 16,) * 16)
    with pytest.raises(InvalidPdf):
        UniformPdf(1, 1)
    with pytest.raises(InvalidInterval):
        QueryInterval(2, 1)
    with pytest.raises(InvalidInterval):
        QueryInterval(float("nan"), 1)


def test_max_pieces_is_configurable():
    pdf = HistogramPdf(tuple(range(17)), (1 / 16,) * 16, max_pieces=18)
    assert pdf.pieces == 18


def test_as_histogram_keeps_probabilities_close():
    p = UncertainPoint(4, UniformPdf(0.3, 2.9))
    q = as_histogram(p)
    for I in (QueryInterval(0, 1), QueryInterval(1.1, 2.2), QueryInterval(-INF, 2.0), QueryInterval(2.5, INF)):
        assert abs(interval_probability(p, I) - interval_probability(q, I)) <= 1e-12


def _trapezoid(pdf, a, b, steps=4000):
    """Numeric integral of the pdf, splitting at its breaks."""
    if isinstance(pdf, UniformPdf):
        pts, dens = (pdf.lo, pdf.hi), (1 / pdf.width,)
    else:
        pts, dens = pdf.breaks, pdf.densities
    total = 0.0
    for (x0, x1), d in zip(zip(pts, pts[1:]), dens):
        lo, hi = max(a, x0), min(b, x1)
        if hi > lo:
            h = (hi - lo) / steps
            total += sum(d * h for _ in range(steps))
    return total


@st.composite
def histograms(draw):
    c = draw(st.integers(1, 6))
    start = draw(st.floats(-20, 20))
    widths = draw(st.lists(st.floats(0.1, 5), min_size=c, max_size=c))
    weights = draw(st.lists(st.floats(0, 3), min_size=c, max_size=c).filter(lambda w: sum(w) > 0.1))
    breaks = [start]
    for w in widths:
        breaks.append(breaks[-1] + w)
    mass = math.fsum(w * (b - a) for w, a, b in zip(weights, breaks, breaks[1:]))
    return HistogramPdf(tuple(breaks), tuple(w / mass for w in weights))


@settings(max_examples=200, deadline=None)
@given(histograms(), st.floats(-30, 60), st.floats(0, 30))
def test_probability_matches_numeric_integration(pdf, a, w):
    p = UncertainPoint(1, pdf)
    I = QueryInterval(a, a + w)
    assert abs(interval_probability(p, I) - _trapezoid(pdf, a, a + w)) <= 1e-7


@settings(max_examples=300, deadline=None)
@given(histograms(), st.floats(-30, 60), st.floats(0, 10), st.floats(0, 10))
def test_additivity(pdf, a, w1, w2):
    p = UncertainPoint(1, pdf)
    m, b = a + w1, a + w1 + w2
    whole = interval_probability(p, QueryInterval(a, b))
    parts = interval_probability(p, QueryInterval(a, m)) + interval_probability(p, QueryInterval(m, b))
    assert abs(whole - parts) <= 1e-9
    assert 0.0 <= whole <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(0.01, 10), st.floats(-15, 15), st.floats(0, 10))
def test_classify_m_iff_strict_containment(lo, w, a, len_):
    p = UncertainPoint(1, UniformPdf(lo, lo + w))
    I = QueryInterval(a, a + len_)
    strict = lo < I.lo and I.hi < lo + w
    assert (classify(p, I) is PointType.M) == strict
