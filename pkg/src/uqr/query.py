"""Query results and the shared top-1 / top-k / threshold driver.

Index classes supply three hooks that work on line or plane heights:

* `_top1_id(I, cnt)`: a point of (near-)maximal probability;
* `_topk_ids(I, k, engine, cnt)`: ids of k points whose probabilities
  are the k largest (ties among equal values resolved arbitrarily);
* `_threshold_ids(I, tau, cnt)`: exactly the ids with probability >= tau,
  for 0 < tau <= 1.

The driver turns those into exact answers with the id tie rule.  Ties
are settled by asking for one extra candidate: if the (k+1)-th
probability is below the k-th, the whole tie group is already in hand.
Otherwise the group of points with exactly that probability is listed
in id order, from the zero/one groups for probabilities 0 and 1 and
from a threshold query for anything in between.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .counters import Counters, check, debug_enabled
from .errors import CapabilityError, KOutOfRange, TauOutOfRange
from .model import INF, QueryInterval, UncertainPoint, interval_probability
from .rangemin import ContainmentIds

SMALLEST_POSITIVE = 5e-324


@dataclass
class QueryResult:
    items: list[tuple[int, float]]
    counters: Counters = field(default_factory=Counters)

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.items]

    @property
    def probs(self) -> list[float]:
        return [p for _, p in self.items]

    def __len__(self) -> int:
        return len(self.items)


def rank_key(item: tuple[int, float]):
    return (-item[1], item[0])


class TieGroups:
    """Id-ordered access to the points whose probability is exactly 0 or 1.

    A point has probability 0 when both interval ends fall in one flat
    zone of its cdf, and probability 1 when the interval covers its
    support.  Both are containment conditions on (zone or support, I).
    """

    def __init__(self, points: Sequence[UncertainPoint]):
        zero_items = []
        one_items = []
        for p in points:
            for z0, z1 in p.flat_zones():
                zero_items.append((z0, z1, p.id))
            s0, s1 = p.support()
            one_items.append((-s0, -s1, p.id))
        self._zero = ContainmentIds(zero_items)
        self._one = ContainmentIds(one_items)
        self._all = sorted(p.id for p in points)

    def zero_ids(self, I: QueryInterval) -> Iterator[int]:
        if I.lo == I.hi:
            return iter(self._all)
        return self._zero.iter_ids(I.lo, I.hi)

    def one_ids(self, I: QueryInterval) -> Iterator[int]:
        return self._one.iter_ids(-I.lo, -I.hi)


def _smallest_ids(need: int, known: Iterable[int], ordered: Iterator[int]) -> list[int]:
    """The `need` smallest ids of known ∪ ordered, where `ordered` ascends."""
    head = []
    for i in ordered:
        head.append(i)
        if len(head) >= need:
            break
    return sorted(set(known) | set(head))[:need]


class IndexBase:
    engines: tuple[str, ...] = ()
    default_engine: str = ""
    bounded: bool = False

    def __init__(self, points: Sequence[UncertainPoint]):
        self.points = {p.id: p for p in points}
        if len(self.points) != len(points):
            raise ValueError("point ids must be unique")
        self.ids = sorted(self.points)
        self.n = len(self.ids)
        self.ties = TieGroups(points)

    # hooks -------------------------------------------------------------
    def _top1_id(self, I: QueryInterval, cnt: Counters) -> int:
        raise NotImplementedError

    def _topk_ids(self, I: QueryInterval, k: int, engine: str, cnt: Counters) -> list[int]:
        raise NotImplementedError

    def _threshold_ids(self, I: QueryInterval, tau: float, cnt: Counters) -> list[int]:
        raise NotImplementedError

    def _check_interval(self, I: QueryInterval) -> None:
        raise NotImplementedError

    # driver ------------------------------------------------------------
    def prob(self, pid: int, I: QueryInterval) -> float:
        return interval_probability(self.points[pid], I)

    def _whole_line(self, I: QueryInterval) -> bool:
        return I.lo == -INF and I.hi == INF

    def _engine(self, engine: Optional[str]) -> str:
        if engine is None or engine == "auto":
            return self.default_engine
        if engine not in self.engines:
            raise CapabilityError(f"{type(self).__name__} has no {engine!r} engine")
        return engine

    def top1(self, I: QueryInterval, counters: Optional[Counters] = None) -> QueryResult:
        self._check_interval(I)
        cnt = counters if counters is not None else Counters()
        if self._whole_line(I):
            cnt.reported += 1
            return QueryResult([(self.ids[0], 1.0)], cnt)
        r0 = cnt.reported
        c = self._top1_id(I, cnt)
        t = self.prob(c, I)
        if t == 1.0:
            best = min(c, next(self.ties.one_ids(I), c))
        elif t == 0.0:
            above = self._threshold_ids(I, SMALLEST_POSITIVE, cnt)
            if above:
                best = min(above, key=lambda i: (-self.prob(i, I), i))
            else:
                best = min(c, next(self.ties.zero_ids(I), c))
        else:
            above = self._threshold_ids(I, t, cnt)
            best = min(above, key=lambda i: (-self.prob(i, I), i))
        p = self.prob(best, I)
        if debug_enabled():
            check(p >= t, "top-1 correction lowered the probability")
        cnt.reported = r0 + 1
        return QueryResult([(best, p)], cnt)

    def topk(
        self, I: QueryInterval, k: int, engine: Optional[str] = None, counters: Optional[Counters] = None
    ) -> QueryResult:
        self._check_interval(I)
        if not 1 <= k <= self.n:
            raise KOutOfRange(f"k={k} outside [1, {self.n}]")
        eng = self._engine(engine)
        cnt = counters if counters is not None else Counters()
        r0 = cnt.reported
        items = self._topk_items(I, k, eng, cnt)
        cnt.reported = r0 + len(items)
        return QueryResult(items, cnt)

    def _topk_items(self, I: QueryInterval, k: int, eng: str, cnt: Counters) -> list[tuple[int, float]]:
        if self._whole_line(I):
            return [(i, 1.0) for i in self.ids[:k]]
        want = min(self.n, k + 1)
        ids = self._topk_ids(I, want, eng, cnt)
        cands = sorted({i: self.prob(i, I) for i in ids}.items(), key=rank_key)
        if debug_enabled():
            check(len(cands) >= want, f"engine returned {len(cands)} candidates, wanted {want}")
        if len(cands) <= k:
            return cands[:k]
        t = cands[k - 1][1]
        if cands[k][1] < t:
            return cands[:k]
        above = [c for c in cands if c[1] > t]
        need = k - len(above)
        tied = [i for i, p in cands if p == t]
        if t == 0.0:
            group = self.ties.zero_ids(I)
        elif t == 1.0:
            group = self.ties.one_ids(I)
        else:
            group = iter(sorted(i for i in self._threshold_ids(I, t, cnt) if self.prob(i, I) == t))
        chosen = _smallest_ids(need, tied, group)
        return above + [(i, t) for i in chosen]

    def threshold(
        self, I: QueryInterval, tau: float, counters: Optional[Counters] = None
    ) -> QueryResult:
        self._check_interval(I)
        if not (0.0 <= tau <= 1.0):
            raise TauOutOfRange(f"tau={tau} outside [0, 1]")
        cnt = counters if counters is not None else Counters()
        r0 = cnt.reported
        if tau <= 0.0:
            ids = self.ids
        elif self._whole_line(I):
            ids = self.ids
        else:
            ids = self._threshold_ids(I, tau, cnt)
        items = sorted({i: self.prob(i, I) for i in ids}.items(), key=rank_key)
        if debug_enabled():
            check(all(p >= tau for _, p in items), "threshold reported a point below tau")
        cnt.reported = r0 + len(items)
        return QueryResult(items, cnt)
