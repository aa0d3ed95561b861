import random

import numpy as np
import pytest

from uqr.counters import Counters
from uqr.errors import EmptyInput, VerticalSegment
from uqr.geom.cascade import FractionalCascade
from uqr.geom.layers import peel_layers
from uqr.geom.lines import Line, Segment, line_from_piece, upper_envelope_lines, upper_envelope_segments
from uqr.geom.persistent import PersistentEnvelope
from uqr.geom.planes import ProjectedPlaneEnvelope
from uqr.halfplane import LayeredHalfplaneIndex
from uqr.model import CdfPiece


def L(a, b, owner=-1):
    return Line(float(a), float(b), owner)


def coeffs(lines):
    return [(ln.slope, ln.intercept) for ln in lines]


def test_envelope_of_x_minus_x_and_zero():
    chain = upper_envelope_lines([L(1, 0), L(-1, 0), L(0, 0)])
    assert coeffs(chain.lines) == [(-1, 0), (1, 0)]
    assert chain.breaks == [0.0]


def test_envelope_of_one_and_x():
    chain = upper_envelope_lines([L(0, 1), L(1, 0)])
    assert coeffs(chain.lines) == [(0, 1), (1, 0)]
    assert chain.breaks == [1.0]


def test_envelope_rejects_empty():
    with pytest.raises(EmptyInput):
        upper_envelope_lines([])


def test_envelope_matches_max_scan():
    rng = random.Random(1)
    lines = [L(rng.uniform(-5, 5), rng.uniform(-5, 5), i) for i in range(100)]
    chain = upper_envelope_lines(lines)
    for x in np.linspace(-20, 20, 1000):
        assert chain.value(x) == max(ln.at(x) for ln in lines)


def test_identical_lines_are_grouped_smallest_owner_first():
    chain = upper_envelope_lines([L(1, 0, 7), L(1, 0, 3), L(0, 5, 9)])
    groups = [[ln.owner for ln in g] for g in chain.groups]
    assert groups == [[9], [3, 7]]


def test_layers_of_four_lines():
    d = peel_layers([L(0, 0, 1), L(0, 1, 2), L(1, 0, 3), L(-1, 0, 4)])
    assert [coeffs(c.lines) for c in d.layers] == [[(-1, 0), (0, 1), (1, 0)], [(0, 0)]]
    assert d.membership[(1, 0)] == 1 and d.membership[(2, 0)] == 0


def test_parallel_lines_peel_one_by_one():
    d = peel_layers([L(0, i, i) for i in range(4)])
    assert [coeffs(c.lines) for c in d.layers] == [[(0, 3)], [(0, 2)], [(0, 1)], [(0, 0)]]


@pytest.mark.parametrize("n", [200, 1500])
def test_layers_satisfy_the_peeling_definition(n):
    rng = random.Random(n)
    lines = [L(rng.choice([rng.uniform(-3, 3), rng.randint(-2, 2)]), rng.uniform(-3, 3), i) for i in range(n)]
    d = peel_layers(lines)
    assert d.size == n
    remaining = list(lines)
    for chain in d.layers:
        ref = upper_envelope_lines(remaining)
        assert coeffs(chain.lines) == coeffs(ref.lines)
        on = {id(ln) for ln in chain.flat}
        remaining = [ln for ln in remaining if id(ln) not in on]
    assert not remaining


def test_tops_iterator_on_four_lines():
    ix = LayeredHalfplaneIndex.build([L(0, 0, 1), L(0, 1, 2), L(1, 0, 3), L(-1, 0, 4)])
    got = [ix.layers[i].groups[e][0].owner for i, e in ix.tops(0.5)]
    assert got == [2, 1]


def test_single_layer_iterator_has_length_one():
    ix = LayeredHalfplaneIndex.build([L(1, 0, 1), L(-1, 0, 2)])
    assert len(list(ix.tops(3.0))) == 1


def test_cascade_walk_equals_per_layer_search(debug):
    rng = random.Random(3)
    lines = [L(rng.uniform(-5, 5), rng.uniform(-5, 5), i) for i in range(500)]
    ix = LayeredHalfplaneIndex.build(lines)
    for _ in range(100):
        x = rng.uniform(-10, 10)
        cnt = Counters()
        walk = list(ix.tops(x, cnt))
        assert walk == [(i, c.locate(x)) for i, c in enumerate(ix.layers)]
        # bridges cost O(1) amortized per layer
        assert cnt.bridge_steps <= 4 * len(ix.layers) + 4


def test_neighbour_heights_decrease_away_from_top():
    rng = random.Random(5)
    chain = upper_envelope_lines([L(rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(300)])
    for _ in range(200):
        x = rng.uniform(-10, 10)
        e = chain.locate(x)
        hs = [chain.height(i, x) for i in range(len(chain))]
        assert all(hs[i] <= hs[i + 1] for i in range(e))
        assert all(hs[i] >= hs[i + 1] for i in range(e, len(hs) - 1))


def test_fractional_cascade_positions():
    rng = random.Random(2)
    cats = [sorted(rng.uniform(0, 100) for _ in range(rng.randint(0, 40))) for _ in range(6)]
    cas = FractionalCascade(cats, [-1, 0, 1, 2, 3, 4])
    for _ in range(300):
        x = rng.uniform(-5, 105)
        pos = cas.search(0, x)
        for v in range(6):
            if v:
                pos = cas.follow(v, pos, x)
            assert cas.own_index(v, pos) == sum(1 for c in cats[v] if c <= x)


def test_segment_envelope_examples():
    one = upper_envelope_segments([Segment(0, 2, L(1, 0, 1))])
    assert one.xs == [0] and one.xe == [2]
    two = upper_envelope_segments([Segment(0, 2, L(1, 0, 1)), Segment(0, 2, L(-1, 2, 2))])
    assert [ln.owner for ln in two.lines] == [2, 1]
    assert two.xs == [0, 1.0] and two.xe == [1.0, 2]
    with pytest.raises(VerticalSegment):
        Segment(1, 1, L(0, 0))


def test_segment_envelope_matches_scan_on_cdf_pieces():
    rng = random.Random(4)
    segs = []
    for i in range(50):
        lo = rng.uniform(0, 10)
        w = rng.uniform(0.5, 4)
        piece = CdfPiece(lo, lo + w, rng.uniform(0, 0.5), rng.uniform(0, 0.5), w)
        segs.append(Segment(lo, lo + w, line_from_piece(piece, i)))
    env = upper_envelope_segments(segs)
    for x in np.linspace(-1, 15, 1000):
        live = [s.line.at(x) for s in segs if s.x0 <= x < s.x1]
        v = env.value(x)
        if not live:
            assert v is None
        else:
            assert abs(v - max(live)) <= 1e-12


def test_persistent_versions_match_rebuilds():
    rng = random.Random(6)
    lines = [L(rng.choice([rng.uniform(-3, 3), rng.randint(-2, 2)]), rng.choice([rng.uniform(-3, 3), 0.0]), i) for i in range(120)]
    pe = PersistentEnvelope(seed=1)
    for ln in lines:
        pe.insert(ln)
    for v in range(1, len(lines) + 1):
        got = [ln.shape for ln in PersistentEnvelope.lines(pe.versions[v])]
        assert got == [ln.shape for ln in upper_envelope_lines(lines[:v]).lines]
        x = rng.uniform(-6, 6)
        assert pe.query(v, x).at(x) == max(ln.at(x) for ln in lines[:v])
    assert pe.query(0, 1.0) is None


def test_plane_locate_examples():
    env = ProjectedPlaneEnvelope(np.array([0.0, 1.0]), np.array([0.0, 0.0]), np.array([1.0, 0.0]), (-5, 5, -5, 5))
    assert env.locate(2.0, 0.0) == 1
    single = ProjectedPlaneEnvelope(np.array([0.3]), np.array([-1.0]), np.array([2.0]), (0, 1, 0, 1))
    assert single.locate(0.5, 0.5) == 0


def test_plane_locate_matches_scan():
    rng = np.random.default_rng(7)
    a, b, c = rng.normal(size=(3, 100))
    env = ProjectedPlaneEnvelope(a, b, c, (-3, 3, -3, 3))
    assert env.ok
    for x, y in rng.uniform(-3, 3, size=(1000, 2)):
        z = a * x + b * y + c
        assert z[env.locate(x, y)] >= z.max() - 1e-12
