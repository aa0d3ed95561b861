import random

import numpy as np
import pytest

from uqr.counters import Counters
from uqr.errors import BoundedInterval, EmptySet, KOutOfRange, NotUniform, TauOutOfRange, UnboundedInterval, CapabilityError
from uqr.generators import random_histogram_points, random_interval, random_uniform_points
from uqr.histogram_bounded import CanonicalSet, HistogramBoundedIndex, doubling_topk, t_highest
from uqr.histogram_unbounded import HistogramUnboundedIndex
from uqr.model import QueryInterval, interval_probability
from uqr.oracle import brute_all
from uqr.uniform_bounded import UniformBoundedIndex
from uqr.uniform_unbounded import UniformUnboundedIndex
from uqr.validate import same_ranking

INF = float("inf")
Q = QueryInterval
SIXTH = 1 / 6


def approx(items):
    return [(i, pytest.approx(p, abs=1e-12)) for i, p in items]


# ---------------------------------------------------------------- uniform, one infinite side


@pytest.mark.parametrize("engine", ["heap", "select", "block"])
def test_uu_examples(d1, engine, debug):
    ix = UniformUnboundedIndex(d1)
    assert ix.top1(Q(-INF, 3)).items == [(1, 1.0)]
    assert ix.topk(Q(-INF, 3), 3, engine).items == approx([(1, 1.0), (3, 1.0), (2, 0.75)])
    assert ix.topk(Q(2, INF), 2, engine).items == approx([(5, 1.0), (4, 0.75)])
    # tie at 0.5 between ids 2 and 3 resolves to the smaller id
    assert ix.topk(Q(2, INF), 3, engine).items == approx([(5, 1.0), (4, 0.75), (2, 0.5)])
    # zero-probability points fill the tail by id
    assert ix.topk(Q(-INF, 1), 4, engine).items == approx([(1, 0.5), (2, 0.25), (3, 0.0), (4, 0.0)])


def test_uu_threshold_and_whole_line(d1, debug):
    ix = UniformUnboundedIndex(d1)
    assert sorted(ix.threshold(Q(-INF, 3), 0.5).ids) == [1, 2, 3, 4]
    assert sorted(ix.threshold(Q(-INF, 3), 1.0).ids) == [1, 3]
    assert sorted(ix.threshold(Q(-INF, 1), 0.0).ids) == [1, 2, 3, 4, 5]
    assert ix.top1(Q(-INF, INF)).items == [(1, 1.0)]


def test_uu_rejects_bounded_and_histograms(d1, d2):
    ix = UniformUnboundedIndex(d1)
    with pytest.raises(BoundedInterval):
        ix.top1(Q(1, 3))
    with pytest.raises(NotUniform):
        UniformUnboundedIndex(d2)


def test_range_errors(d1):
    ix = UniformUnboundedIndex(d1)
    with pytest.raises(KOutOfRange):
        ix.topk(Q(-INF, 3), 6)
    with pytest.raises(KOutOfRange):
        ix.topk(Q(-INF, 3), 0)
    with pytest.raises(TauOutOfRange):
        ix.threshold(Q(-INF, 3), 1.5)
    with pytest.raises(CapabilityError):
        UniformBoundedIndex(d1).topk(Q(1, 3), 1, "select")


# ---------------------------------------------------------------- uniform, bounded


@pytest.mark.parametrize("engine", ["heap", "block"])
def test_ub_examples(d1, engine, debug):
    ix = UniformBoundedIndex(d1)
    assert ix.top1(Q(1, 3)).items == [(3, 1.0)]
    assert ix.topk(Q(1, 3), 3, engine).items == approx([(3, 1.0), (1, 0.5), (2, 0.5)])
    assert ix.top1(Q(3, 4)).items == [(2, 0.25)]
    assert ix.topk(Q(3, 4), 3, engine).items == approx([(2, 0.25), (4, 0.25), (5, SIXTH)])
    assert ix.topk(Q(0, 8), 5, engine).items == approx([(i, 1.0) for i in range(1, 6)])
    assert ix.topk(Q(2.5, 2.5), 2, engine).items == [(1, 0.0), (2, 0.0)]


def test_ub_threshold(d1, debug):
    ix = UniformBoundedIndex(d1)
    assert sorted(ix.threshold(Q(1, 3), 0.5).ids) == [1, 2, 3, 4]
    assert ix.threshold(Q(1, 3), 1.0).ids == [3]
    with pytest.raises(UnboundedInterval):
        ix.top1(Q(-INF, 3))


# ---------------------------------------------------------------- histograms, one infinite side


@pytest.mark.parametrize("engine", ["heap", "block"])
def test_hu_examples(d2, engine, debug):
    ix = HistogramUnboundedIndex(d2)
    assert ix.top1(Q(-INF, 2.5)).items == approx([(1, 0.875)])
    assert ix.topk(Q(-INF, 2.5), 2, engine).items == approx([(1, 0.875), (3, 0.5)])
    assert ix.topk(Q(3, INF), 3, engine).items == approx([(2, 0.5), (3, 0.5), (1, 0.0)])


def test_hu_threshold(d2, debug):
    ix = HistogramUnboundedIndex(d2)
    assert sorted(ix.threshold(Q(-INF, 2.5), 0.3).ids) == [1, 3]
    assert ix.threshold(Q(-INF, 0.4), 0.2).ids == [1]


def test_hu_accepts_uniform_points(d1, debug):
    ix = HistogramUnboundedIndex(d1)
    assert ix.topk(Q(-INF, 3), 3).items == approx([(1, 1.0), (3, 1.0), (2, 0.75)])


# ---------------------------------------------------------------- histograms, bounded


def test_hb_examples(d2, debug):
    ix = HistogramBoundedIndex(d2)
    assert ix.top1(Q(1, 5.5)).items == [(2, 1.0)]
    assert ix.topk(Q(1, 5.5), 3).items == approx([(2, 1.0), (1, 0.5), (3, 0.5)])
    assert ix.threshold(Q(1, 5.5), 0.6).ids == [2]
    assert ix.topk(Q(4.5, 6), 2).items == approx([(3, 0.5), (1, 0.0)])
    with pytest.raises(UnboundedInterval):
        ix.top1(Q(-INF, 1))


def test_hb_one_plane_per_point(debug):
    rng = random.Random(11)
    pts = random_histogram_points(60, 5, rng)
    ix = HistogramBoundedIndex(pts)
    for _ in range(50):
        I = random_interval(rng, pts, True)
        owners = np.concatenate([ix.table.owner[s.planes] for s in ix.sets(I)])
        assert sorted(owners.tolist()) == sorted(p.id for p in pts)


def test_hb_plane_values_equal_model(debug):
    rng = random.Random(12)
    pts = random_histogram_points(40, 4, rng)
    ix = HistogramBoundedIndex(pts)
    by_id = {p.id: p for p in pts}
    for _ in range(50):
        I = random_interval(rng, pts, True)
        for s in ix.sets(I):
            vals = ix.table.values(s.planes, I.lo, I.hi)
            for q, v in zip(s.planes, vals):
                assert v == interval_probability(by_id[int(ix.table.owner[q])], I)


class StubTable:
    """Planes with fixed values, one owner per plane."""

    def __init__(self, values):
        self._v = np.asarray(values, dtype=float)
        self.owner = np.arange(len(values), dtype=np.int64)

    def values(self, idx, xl, xr):
        return self._v[idx]


def test_t_highest():
    table = StubTable([0.2, 0.9, 0.5, 0.9, 0.1])
    s = CanonicalSet(0, np.arange(5))
    planes, vals = t_highest(table, s, 0, 1, 3)
    assert planes.tolist() == [1, 3, 2] and vals.tolist() == [0.9, 0.9, 0.5]
    planes, _ = t_highest(table, s, 0, 1, 10)
    assert planes.tolist() == [1, 3, 2, 0, 4]
    with pytest.raises(EmptySet):
        t_highest(table, CanonicalSet(1, np.arange(0)), 0, 1, 1)


def test_doubling_example(debug):
    table = StubTable([10, 6, 2, 9, 8, 1])
    sets = [CanonicalSet(0, np.array([0, 1, 2])), CanonicalSet(1, np.array([3, 4, 5]))]
    best, stats = doubling_topk(table, sets, 0, 1, 3, 2, Counters())
    assert [v for v, _ in best] == [10, 9, 8]
    assert stats.pool_size <= 2 * 3 + 2 * 1


@pytest.mark.parametrize("seed", range(4))
def test_doubling_bounds_on_random_sets(seed, debug):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, 60, size=8)
    table = StubTable(rng.random(int(sizes.sum())))
    starts = np.concatenate([[0], np.cumsum(sizes)])
    sets = [CanonicalSet(i, np.arange(starts[i], starts[i + 1])) for i in range(len(sizes))]
    n = int(sizes.sum())
    for k in (1, 5, 17, n):
        best, _ = doubling_topk(table, sets, 0, 1, k, n, Counters())
        assert [v for v, _ in best] == sorted(table._v, reverse=True)[:k]


# ---------------------------------------------------------------- all indexes against the oracle

CASES = [
    (UniformUnboundedIndex, False, "uniform"),
    (UniformBoundedIndex, True, "uniform"),
    (HistogramUnboundedIndex, False, "hist"),
    (HistogramBoundedIndex, True, "hist"),
]


@pytest.mark.parametrize("cls,bounded,kind", CASES, ids=["uu", "ub", "hu", "hb"])
@pytest.mark.parametrize("seed", range(3))
def test_random_against_oracle(cls, bounded, kind, seed, debug):
    rng = random.Random(f"{cls.__name__}:{seed}")
    n = rng.choice([3, 30, 150])
    pts = random_uniform_points(n, rng) if kind == "uniform" else random_histogram_points(n, 4, rng)
    ix = cls(pts)
    pts = list(ix.points.values())
    for _ in range(30):
        I = random_interval(rng, pts, bounded)
        truth = brute_all(pts, I)
        assert same_ranking(ix.top1(I).items, truth[:1])
        k = rng.randint(1, n)
        for eng in ix.engines:
            assert same_ranking(ix.topk(I, k, eng).items, truth[:k]), eng
        tau = truth[rng.randrange(n)][1]
        assert sorted(ix.threshold(I, tau).ids) == sorted(i for i, p in truth if p >= tau)


def test_hb_linear_plane_form_matches_up_to_rounding():
    rng = random.Random(13)
    pts = random_histogram_points(40, 4, rng)
    ix = HistogramBoundedIndex(pts)
    for _ in range(50):
        I = random_interval(rng, pts, True)
        for s in ix.sets(I):
            exact = ix.table.values(s.planes, I.lo, I.hi)
            linear = np.clip(ix.table.linear_values(s.planes, I.lo, I.hi), 0.0, 1.0)
            assert np.allclose(exact, linear, rtol=0, atol=1e-9)
