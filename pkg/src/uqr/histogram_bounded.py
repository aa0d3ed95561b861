"""Histogram pdfs, bounded query intervals.

For I = [x_l, x_r] with x_l in piece i and x_r in piece j of a cdf F,
Pr[p in I] = F_j(x_r) - F_i(x_l), a plane in (x_l, x_r).  Every piece
pair (i <= j) of every point becomes a plane valid on the rectangle
piece_i x piece_j.  A two-level segment tree stores the planes: the
outer level over x_l elementary intervals, and inside each outer node
an inner level over x_r elementary intervals.  For a query, the outer
path of x_l crossed with the inner paths of x_r yields the canonical
sets F(I), which hold exactly one plane per point, valued at (x_l, x_r)
by that point's probability.

Top-1 locates (x_l, x_r) in each set's projected plane envelope.  Top-k
runs the prefix-doubling heap over the sets, then selects from the pool.
Threshold scans the sets whose envelope maximum reaches tau.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .counters import Counters, check, debug_enabled
from .errors import EmptySet, UnboundedInterval
from .geom.planes import ProjectedPlaneEnvelope
from .model import INF, QueryInterval, UncertainPoint, as_histogram
from .query import IndexBase

# sets smaller than this are scanned instead of getting an envelope
ENVELOPE_MIN = 32
# a set is skipped by threshold only if its envelope maximum is this far below tau
GATE_MARGIN = 1e-7


def canonical_nodes(a: np.ndarray, b: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Canonical nodes of leaf ranges [a[r], b[r]) in a heap-ordered tree.

    The tree has `size` leaves (a power of two), node 1 is the root and
    node v has children 2v and 2v+1.  Returns (row, node) pairs.
    """
    rows_out, nodes_out = [], []
    row = np.arange(len(a))
    lo = np.asarray(a, dtype=np.int64) + size
    hi = np.asarray(b, dtype=np.int64) + size
    while True:
        act = lo < hi
        if not act.any():
            break
        m1 = act & (lo & 1 == 1)
        rows_out.append(row[m1])
        nodes_out.append(lo[m1])
        lo = lo + m1
        m2 = act & (hi & 1 == 1)
        hi = hi - m2
        rows_out.append(row[m2])
        nodes_out.append(hi[m2])
        lo >>= 1
        hi >>= 1
    if not rows_out:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(rows_out), np.concatenate(nodes_out)


def piece_raw(x, lo, y0, rise, run):
    """Vectorized `CdfPiece.raw`, evaluated in the same operation order."""
    with np.errstate(invalid="ignore", over="ignore"):
        return np.where(rise == 0.0, y0, y0 + rise * (x - lo) / run)


@dataclass
class CanonicalSet:
    key: int
    planes: np.ndarray  # plane indexes

    def __len__(self) -> int:
        return len(self.planes)


class PlaneTable:
    """Planes of all piece pairs, stored column-wise."""

    def __init__(self, points: Sequence[UncertainPoint]):
        cols: dict[str, list] = {k: [] for k in ("owner", "ilo", "ihi", "iy0", "irise", "irun", "jlo", "jhi", "jy0", "jrise", "jrun", "pi", "pj")}
        piece_pos = 0
        self.piece_lo: list[float] = []
        self.piece_hi: list[float] = []
        # per piece: the planes that use it as the x_l piece
        self.first_plane: list[int] = []
        self.plane_count: list[int] = []
        for p in points:
            pieces = p.cdf.pieces
            for i, pi in enumerate(pieces):
                self.piece_lo.append(pi.lo)
                self.piece_hi.append(pi.hi)
                self.first_plane.append(len(cols["owner"]))
                self.plane_count.append(len(pieces) - i)
                for j in range(i, len(pieces)):
                    pj = pieces[j]
                    cols["owner"].append(p.id)
                    cols["ilo"].append(pi.lo)
                    cols["ihi"].append(pi.hi)
                    cols["iy0"].append(pi.y0)
                    cols["irise"].append(pi.rise)
                    cols["irun"].append(pi.run)
                    cols["jlo"].append(pj.lo)
                    cols["jhi"].append(pj.hi)
                    cols["jy0"].append(pj.y0)
                    cols["jrise"].append(pj.rise)
                    cols["jrun"].append(pj.run)
                    cols["pi"].append(piece_pos + i)
                    cols["pj"].append(piece_pos + j)
            piece_pos += len(pieces)
        for k, v in cols.items():
            setattr(self, k, np.asarray(v, dtype=np.int64 if k in ("owner", "pi", "pj") else float))
        # plane form z = alpha*x_l + beta*x_r + gamma, for geometry only
        si = np.where(self.irise == 0.0, 0.0, self.irise / self.irun)
        sj = np.where(self.jrise == 0.0, 0.0, self.jrise / self.jrun)
        with np.errstate(invalid="ignore"):
            bi = np.where(self.irise == 0.0, self.iy0, self.iy0 - si * self.ilo)
            bj = np.where(self.jrise == 0.0, self.jy0, self.jy0 - sj * self.jlo)
        self.alpha = -si
        self.beta = sj
        self.gamma = bj - bi

    def __len__(self) -> int:
        return len(self.owner)

    def values(self, idx: np.ndarray, xl: float, xr: float) -> np.ndarray:
        """Probabilities of the planes' owners, bit-identical to the model."""
        fr = np.clip(piece_raw(xr, self.jlo[idx], self.jy0[idx], self.jrise[idx], self.jrun[idx]), 0.0, 1.0)
        fl = np.clip(piece_raw(xl, self.ilo[idx], self.iy0[idx], self.irise[idx], self.irun[idx]), 0.0, 1.0)
        return np.clip(fr - fl, 0.0, 1.0)

    def linear_values(self, idx: np.ndarray, xl: float, xr: float) -> np.ndarray:
        return self.alpha[idx] * xl + self.beta[idx] * xr + self.gamma[idx]


class CanonicalTree:
    """Two-level segment tree of planes keyed by (outer node, inner node)."""

    def __init__(self, points: Sequence[UncertainPoint]):
        self.table = PlaneTable(points)
        t = self.table
        self.edges = np.array(sorted({b for p in points for b in p.cdf.breaks}), dtype=float)
        leaves = len(self.edges) + 1
        self.size = 1 << max(0, (leaves - 1).bit_length())
        self.depth = self.size.bit_length()
        plo = np.asarray(t.piece_lo)
        phi = np.asarray(t.piece_hi)
        pa = np.where(plo == -INF, 0, np.searchsorted(self.edges, plo) + 1)
        pb = np.where(phi == INF, leaves, np.searchsorted(self.edges, phi) + 1)
        # outer: x_l piece ranges
        prow, unode = canonical_nodes(pa, pb, self.size)
        first = np.asarray(t.first_plane, dtype=np.int64)[prow]
        count = np.asarray(t.plane_count, dtype=np.int64)[prow]
        rep_u = np.repeat(unode, count)
        offs = np.arange(int(count.sum())) - np.repeat(np.cumsum(count) - count, count)
        plane = np.repeat(first, count) + offs
        # inner: x_r piece ranges of those planes
        pj = t.pj[plane]
        qrow, wnode = canonical_nodes(pa[pj], pb[pj], self.size)
        keys = rep_u[qrow] * (2 * self.size) + wnode
        order = np.argsort(keys, kind="stable")
        self.plane_of = plane[qrow][order]
        skeys = keys[order]
        self.keys, self.starts = np.unique(skeys, return_index=True)
        self.ends = np.append(self.starts[1:], len(skeys))
        self.copies = len(skeys)
        self._env: dict[int, Optional[ProjectedPlaneEnvelope]] = {}

    def leaf(self, x: float) -> int:
        return int(np.searchsorted(self.edges, x, side="right"))

    def _node_range(self, v: int) -> tuple[int, int]:
        h = self.size.bit_length() - v.bit_length()
        lo = (v << h) - self.size
        return lo, lo + (1 << h)

    def _edge(self, leaf_boundary: int, pad: float) -> float:
        e = self.edges
        if leaf_boundary <= 0:
            return float(e[0]) - pad
        if leaf_boundary - 1 >= len(e):
            return float(e[-1]) + pad
        return float(e[leaf_boundary - 1])

    def box(self, key: int) -> tuple[float, float, float, float]:
        u, w = divmod(key, 2 * self.size)
        pad = 1.0 + float(self.edges[-1] - self.edges[0])
        ua, ub = self._node_range(u)
        wa, wb = self._node_range(w)
        return self._edge(ua, pad), self._edge(ub, pad), self._edge(wa, pad), self._edge(wb, pad)

    def canonical_sets(self, xl: float, xr: float, cnt: Optional[Counters] = None) -> list[CanonicalSet]:
        lu = self.leaf(xl) + self.size
        lw = self.leaf(xr) + self.size
        us = np.array([lu >> s for s in range(self.depth)], dtype=np.int64)
        ws = np.array([lw >> s for s in range(self.depth)], dtype=np.int64)
        want = (us[:, None] * (2 * self.size) + ws[None, :]).ravel()
        pos = np.searchsorted(self.keys, want)
        pos = np.minimum(pos, len(self.keys) - 1)
        hit = self.keys[pos] == want
        if cnt is not None:
            cnt.comparisons += len(want) * max(1, len(self.keys).bit_length())
        out = []
        for p in pos[hit]:
            out.append(CanonicalSet(int(self.keys[p]), self.plane_of[self.starts[p] : self.ends[p]]))
        return out

    def envelope(self, s: CanonicalSet) -> Optional[ProjectedPlaneEnvelope]:
        if len(s) < ENVELOPE_MIN:
            return None
        if s.key not in self._env:
            t = self.table
            env = ProjectedPlaneEnvelope(t.alpha[s.planes], t.beta[s.planes], t.gamma[s.planes], self.box(s.key))
            self._env[s.key] = env if env.ok else None
        return self._env[s.key]


def t_highest(table: PlaneTable, s: CanonicalSet, xl: float, xr: float, t: int, cnt: Optional[Counters] = None):
    """The min(t, |S|) highest planes of S at (x_l, x_r), descending, ties by owner.

    Returns (plane indexes, values).  A linear partial-selection scan.
    """
    if len(s) == 0:
        raise EmptySet("t-highest query on an empty set")
    vals = table.values(s.planes, xl, xr)
    if cnt is not None:
        cnt.accesses += len(s)
        cnt.comparisons += len(s)
    t = min(t, len(s))
    if t < len(s):
        part = np.argpartition(-vals, t - 1)[:t]
    else:
        part = np.arange(len(s))
    order = part[np.lexsort((table.owner[s.planes[part]], -vals[part]))]
    return s.planes[order], vals[order]


@dataclass
class DoublingStats:
    extractions: int
    pool_size: int
    sets: int
    r: int


def doubling_topk(
    table: PlaneTable, sets: list[CanonicalSet], xl: float, xr: float, k: int, n: int, cnt: Counters
) -> tuple[list[tuple[float, int]], DoublingStats]:
    """k highest (value, plane) pairs over the canonical sets, by prefix doubling.

    Each set starts with its L = ceil(log2 n) highest planes; a max-heap
    holds each set's lowest prefix plane.  Extracting set i adds its
    prefix to R (counted by r) and, unless r >= k, doubles the prefix.
    Sets whose next prefix would be the whole set go straight to the
    pool, so every extraction adds at least L planes to R.  The pool R'
    is the union of current prefixes plus whole sets.
    """
    L = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    f = len(sets)
    level = [0] * f
    prefix: list[Optional[tuple[np.ndarray, np.ndarray]]] = [None] * f
    pooled: list[tuple[np.ndarray, np.ndarray]] = []
    heap: list = []
    consumed = [0] * f

    def advance(i: int, size: int) -> None:
        s = sets[i]
        if size >= len(s):
            pooled.append(t_highest(table, s, xl, xr, len(s), cnt))
            prefix[i] = None
            return
        planes, vals = t_highest(table, s, xl, xr, size, cnt)
        prefix[i] = (planes, vals)
        level[i] += 1
        cnt.comparisons += max(1, (len(heap) + 1).bit_length())
        heapq.heappush(heap, (-float(vals[-1]), int(table.owner[planes[-1]]), i))

    for i in range(f):
        advance(i, L)
    r = 0
    extractions = 0
    last = None
    while heap and r < k:
        cnt.comparisons += max(1, len(heap).bit_length())
        negv, _, i = heapq.heappop(heap)
        extractions += 1
        if debug_enabled() and last is not None:
            check(-negv <= last, "doubling heap extracted out of order")
        last = -negv
        size = len(prefix[i][0])
        r += size - consumed[i]
        consumed[i] = size
        if r >= k:
            break
        advance(i, 2 * size)
    pool_planes = [p for p in prefix if p is not None] + pooled
    planes = np.concatenate([p for p, _ in pool_planes])
    vals = np.concatenate([v for _, v in pool_planes])
    if debug_enabled():
        in_r = sum(consumed)
        check(in_r == r, "r does not count R")
        check(len(planes) <= 2 * k + f * L, f"|R'|={len(planes)} exceeds 2k + fL = {2 * k + f * L}")
        check(extractions <= math.ceil(k / L) + 1, f"{extractions} extractions exceed ceil(k/L)+1")
        # R within R': every consumed prefix is a prefix of a pool entry
        pool_ids = set(planes.tolist())
        for i in range(f):
            if consumed[i]:
                got, _ = t_highest(table, sets[i], xl, xr, consumed[i])
                check(set(got.tolist()) <= pool_ids, "R is not contained in R'")
    order = np.lexsort((table.owner[planes], -vals))[:k]
    best = [(float(vals[o]), int(planes[o])) for o in order]
    if debug_enabled():
        allp = np.concatenate([s.planes for s in sets])
        allv = table.values(allp, xl, xr)
        kth = np.sort(allv)[::-1][k - 1]
        check(best[-1][0] >= kth, "B is not contained in R'")
    return best, DoublingStats(extractions, len(planes), f, r)


class HistogramBoundedIndex(IndexBase):
    engines = ("heap",)
    default_engine = "heap"
    bounded = True

    def __init__(self, points: Sequence[UncertainPoint]):
        points = [as_histogram(p) for p in points]
        super().__init__(points)
        self.tree = CanonicalTree(points)
        self.table = self.tree.table
        self.last_stats: Optional[DoublingStats] = None

    def _check_interval(self, I: QueryInterval) -> None:
        if not I.bounded:
            raise UnboundedInterval("this index answers bounded intervals")

    def sets(self, I: QueryInterval, cnt: Optional[Counters] = None) -> list[CanonicalSet]:
        sets = self.tree.canonical_sets(I.lo, I.hi, cnt)
        if debug_enabled():
            owners = np.concatenate([self.table.owner[s.planes] for s in sets]) if sets else np.zeros(0)
            check(
                len(owners) == self.n and len(np.unique(owners)) == self.n,
                f"canonical sets hold {len(owners)} planes for {len(np.unique(owners))} of {self.n} points",
            )
        return sets

    def _top1_id(self, I: QueryInterval, cnt: Counters) -> int:
        best = None
        for s in self.sets(I, cnt):
            env = self.tree.envelope(s)
            if env is None:
                vals = self.table.values(s.planes, I.lo, I.hi)
                cnt.comparisons += len(s)
                q = int(s.planes[int(np.argmax(vals))])
            else:
                q = int(s.planes[env.locate(I.lo, I.hi, cnt)])
            v = float(self.table.values(np.array([q]), I.lo, I.hi)[0])
            key = (-v, int(self.table.owner[q]))
            if best is None or key < best:
                best = key
        return best[1]

    def _topk_ids(self, I: QueryInterval, k: int, engine: str, cnt: Counters) -> list[int]:
        sets = self.sets(I, cnt)
        best, stats = doubling_topk(self.table, sets, I.lo, I.hi, k, self.n, cnt)
        cnt.extractions += stats.extractions
        self.last_stats = stats
        return [int(self.table.owner[q]) for _, q in best]

    def _threshold_ids(self, I: QueryInterval, tau: float, cnt: Counters) -> list[int]:
        out: list[int] = []
        for s in self.sets(I, cnt):
            env = self.tree.envelope(s)
            if env is not None:
                q = s.planes[env.locate(I.lo, I.hi, cnt)]
                top = float(self.table.values(np.array([q]), I.lo, I.hi)[0])
                if top < tau - GATE_MARGIN:
                    continue
            vals = self.table.values(s.planes, I.lo, I.hi)
            cnt.comparisons += len(s)
            out.extend(int(o) for o in self.table.owner[s.planes[vals >= tau]])
        cnt.reported += len(out)
        return out
