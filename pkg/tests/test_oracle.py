import pytest

from uqr.model import QueryInterval
from uqr.oracle import brute_all, brute_threshold, brute_top1, brute_topk

INF = float("inf")
Q = QueryInterval


def test_ranking_breaks_ties_by_id(d1):
    assert brute_all(d1, Q(2, INF)) == [(5, 1.0), (4, 0.75), (2, 0.5), (3, 0.5), (1, 0.0)]


def test_top1_topk_threshold(d1):
    assert brute_top1(d1, Q(1, 3)) == (3, 1.0)
    assert brute_topk(d1, Q(1, 3), 2) == [(3, 1.0), (1, 0.5)]
    assert sorted(i for i, _ in brute_threshold(d1, Q(1, 3), 0.5)) == [1, 2, 3, 4]


def test_histogram_values(d2):
    got = dict(brute_all(d2, Q(-INF, 2.5)))
    assert got == {1: pytest.approx(0.875), 3: pytest.approx(0.5), 2: pytest.approx(0.25)}
