"""Layered half-plane reporting and the three top-k extraction engines.

A `LayeredHalfplaneIndex` holds the envelope layers of a line set plus
cascade positions for each layer.  Queries work on *sources*: an index
together with an optional precomputed cascade position for its first
layer (trees of indexes hand these down from parent to child).

Engines return `Hit` records sorted by height (descending), then owner.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .counters import Counters, check, debug_enabled
from .errors import EmptyInput, KOutOfRange, NotEnoughElements
from .geom.cascade import FractionalCascade
from .geom.layers import LayerDecomposition, peel_layers
from .geom.lines import Line


@dataclass(frozen=True)
class Hit:
    height: float
    line: Line

    @property
    def owner(self) -> int:
        return self.line.owner


def _hit_key(h: Hit):
    return (-h.height, h.line.owner, h.line.tag)


def _heap_cost(size: int) -> int:
    return max(1, size.bit_length())


class LayeredHalfplaneIndex:
    """Envelope layers of a line set with cascading bridges between them."""

    def __init__(self, decomp: Optional[LayerDecomposition], cascade: FractionalCascade, nodes: list[int]):
        self.decomp = decomp
        self.layers = decomp.layers if decomp is not None else []
        self.cascade = cascade
        self.nodes = nodes

    @classmethod
    def build(cls, lines: Sequence[Line]) -> "LayeredHalfplaneIndex":
        if not lines:
            raise EmptyInput("half-plane index over no lines")
        decomp = peel_layers(lines)
        cascade = FractionalCascade(
            [c.breaks for c in decomp.layers], [-1] + list(range(len(decomp.layers) - 1))
        )
        return cls(decomp, cascade, list(range(len(decomp.layers))))

    def __len__(self) -> int:
        return 0 if self.decomp is None else self.decomp.size

    def tops(
        self, x: float, counters: Optional[Counters] = None, pos: Optional[int] = None
    ) -> Iterator[tuple[int, int]]:
        """Yield (layer, entry of the top line at x) layer after layer."""
        cas = self.cascade
        for i, chain in enumerate(self.layers):
            node = self.nodes[i]
            if i == 0:
                p = pos if pos is not None else cas.search(node, x, counters)
            else:
                p = cas.follow(node, p, x, counters)
            e = chain.refine(cas.own_index(node, p), x, counters)
            if counters is not None:
                counters.layers_visited += 1
            if debug_enabled():
                check(e == chain.locate(x), f"cascade located entry {e} in layer {i}, search disagrees")
            yield i, e


Source = tuple[LayeredHalfplaneIndex, Optional[int]]


def _sources(index_or_sources) -> list[Source]:
    if isinstance(index_or_sources, LayeredHalfplaneIndex):
        return [(index_or_sources, None)]
    return list(index_or_sources)


def report_above(index_or_sources, qx: float, qy: float, counters: Optional[Counters] = None) -> list[Line]:
    """Every line l with l(qx) >= qy."""
    cnt = counters if counters is not None else Counters()
    out: list[Line] = []
    for index, pos in _sources(index_or_sources):
        for i, e in index.tops(qx, cnt, pos):
            chain = index.layers[i]
            cnt.comparisons += 1
            if chain.height(e, qx) < qy:
                break
            out.extend(chain.groups[e])
            r = e + 1
            while r < len(chain):
                cnt.comparisons += 1
                if chain.height(r, qx) < qy:
                    break
                out.extend(chain.groups[r])
                r += 1
            l = e - 1
            while l >= 0:
                cnt.comparisons += 1
                if chain.height(l, qx) < qy:
                    break
                out.extend(chain.groups[l])
                l -= 1
    cnt.reported += len(out)
    return out


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise KOutOfRange(f"k={k} outside [1, {n}]")


def topk_heap(index_or_sources, x: float, k: int, counters: Optional[Counters] = None) -> list[Hit]:
    """k highest lines at x via the candidate heap.

    Each source contributes the top line of its first layer.  Extracting
    a layer's top line inserts its two chain neighbours and the next
    layer's top; extracting a neighbour inserts the next line further out
    on the same side.  So at most three insertions per extraction.
    """
    sources = _sources(index_or_sources)
    total = sum(len(ix) for ix, _ in sources)
    _check_k(k, total)
    cnt = counters if counters is not None else Counters()
    iters = [ix.tops(x, cnt, pos) for ix, pos in sources]
    heap: list = []
    TOP, RIGHT, LEFT = 0, 1, 2

    def push(s: int, layer: int, fpos: int, kind: int) -> None:
        ln = sources[s][0].layers[layer].flat[fpos]
        cnt.comparisons += _heap_cost(len(heap) + 1)
        heapq.heappush(heap, (-ln.at(x), ln.owner, ln.tag, s, layer, fpos, kind))

    def push_top(s: int) -> None:
        nxt = next(iters[s], None)
        if nxt is not None:
            layer, e = nxt
            push(s, layer, sources[s][0].layers[layer].start[e], TOP)

    for s in range(len(sources)):
        push_top(s)
    out: list[Hit] = []
    seen: set[int] = set()
    last = math.inf
    while heap and len(out) < k:
        cnt.comparisons += _heap_cost(len(heap))
        negh, owner, _tag, s, layer, fpos, kind = heapq.heappop(heap)
        cnt.extractions += 1
        chain = sources[s][0].layers[layer]
        ln = chain.flat[fpos]
        if debug_enabled():
            check(-negh <= last, "candidate heap extraction order increased")
            last = -negh
        if owner not in seen:
            seen.add(owner)
            out.append(Hit(-negh, ln))
        if kind in (TOP, RIGHT) and fpos + 1 < len(chain.flat):
            push(s, layer, fpos + 1, RIGHT)
        if kind in (TOP, LEFT) and fpos > 0:
            push(s, layer, fpos - 1, LEFT)
        if kind == TOP:
            push_top(s)
    cnt.reported += len(out)
    return out


class SortedStream:
    """A non-increasing sequence read lazily through `fetch(t)`.

    Reads are cached, so `accesses` counts distinct elements touched.
    """

    def __init__(self, fetch: Callable[[int], float], length: int, counters: Optional[Counters] = None):
        self._fetch = fetch
        self.length = length
        self.counters = counters
        self._cache: dict[int, float] = {}

    @classmethod
    def of(cls, values: Sequence[float], counters: Optional[Counters] = None) -> "SortedStream":
        vals = list(values)
        return cls(vals.__getitem__, len(vals), counters)

    def __len__(self) -> int:
        return self.length

    def get(self, t: int) -> float:
        v = self._cache.get(t)
        if v is None:
            v = self._fetch(t)
            self._cache[t] = v
            if self.counters is not None:
                self.counters.accesses += 1
        return v


class _Column:
    """Every `step`-th element of a stream from `offset`, cut to `length`."""

    __slots__ = ("stream", "step", "offset", "length")

    def __init__(self, stream: SortedStream, step: int, offset: int, length: int):
        self.stream, self.step, self.offset, self.length = stream, step, offset, length

    def get(self, t: int) -> float:
        return self.stream.get(self.offset + t * self.step)

    def cut(self, length: int) -> "_Column":
        return _Column(self.stream, self.step, self.offset, min(self.length, length))

    def odd(self) -> "_Column":
        # elements at positions 1, 3, 5, ... of this column
        return _Column(self.stream, 2 * self.step, self.offset + self.step, self.length // 2)


def kth_largest(values: Sequence[float], k: int) -> float:
    """k-th largest value (1-based) by linear-time selection."""
    if not 1 <= k <= len(values):
        raise NotEnoughElements(f"need {k} values, have {len(values)}")
    if len(values) <= 64:
        return sorted(values, reverse=True)[k - 1]
    arr = np.asarray(values, dtype=float)
    return float(np.partition(arr, len(arr) - k)[len(arr) - k])


def _select(cols: list[_Column], k: int) -> float:
    if len(cols) > k:
        heads = [c.get(0) for c in cols]
        h = kth_largest(heads, k)
        keep = [c for c, v in zip(cols, heads) if v > h]
        keep += [c for c, v in zip(cols, heads) if v == h][: k - len(keep)]
        cols = keep
    cols = [c.cut(k) for c in cols]
    total = sum(c.length for c in cols)
    if total <= 4 * k + 8:
        return kth_largest([c.get(t) for c in cols for t in range(c.length)], k)
    half = [c.odd() for c in cols if c.length >= 2]
    k2 = (k + 1) // 2
    v = _select(half, k2)
    bigger = []
    for c in cols:
        t = 0
        while t < c.length:
            val = c.get(t)
            if not val > v:
                break
            bigger.append(val)
            t += 1
    if len(bigger) >= k:
        return kth_largest(bigger, k)
    return v


def select_kth_desc(streams: Sequence[SortedStream], k: int) -> float:
    """k-th largest element of the union of non-increasing streams.

    Keeps only the k columns with the largest heads, halves the problem
    on the odd-position submatrix, then finishes with the fewer than
    k + (columns) elements that beat the recursive answer.  Touches
    O(#streams + k) elements.
    """
    cols = [_Column(s, 1, 0, len(s)) for s in streams if len(s) > 0]
    if k < 1 or sum(c.length for c in cols) < k:
        raise NotEnoughElements(f"fewer than {k} elements across {len(cols)} streams")
    return _select(cols, k)


def _layer_streams(index: LayeredHalfplaneIndex, layer: int, e: int, x: float, k: int, cnt: Counters):
    chain = index.layers[layer]
    flat = chain.flat
    st = chain.start[e]
    right = SortedStream(lambda t: flat[st + t].at(x), min(k, len(flat) - st), cnt)
    left = SortedStream(lambda t: flat[st - 1 - t].at(x), min(k, st), cnt)
    return (right, st, 1), (left, st - 1, -1)


def _collect(streams, tau: float, cnt: Counters) -> list[Hit]:
    """Lines at or above tau from (stream, first flat position, direction) triples."""
    out = []
    for (stream, base, step), flat in streams:
        for t in range(len(stream)):
            v = stream.get(t)
            cnt.comparisons += 1
            if v < tau:
                break
            out.append(Hit(v, flat[base + step * t]))
    return out


def _best(hits: list[Hit], k: int) -> list[Hit]:
    seen: set[int] = set()
    out = []
    for h in sorted(hits, key=_hit_key):
        if h.owner in seen:
            continue
        seen.add(h.owner)
        out.append(h)
        if len(out) == k:
            break
    return out


def topk_select(index: LayeredHalfplaneIndex, x: float, k: int, counters: Optional[Counters] = None) -> list[Hit]:
    """k highest lines at x by selection over 2k sorted streams.

    The k highest lines lie in the first k layers, within k positions of
    each layer's top line, so the answer is the k largest of the
    streams walking right and left from each of those tops.
    """
    _check_k(k, len(index))
    cnt = counters if counters is not None else Counters()
    streams = []
    for layer, e in itertools.islice(index.tops(x, cnt), k):
        flat = index.layers[layer].flat
        for st in _layer_streams(index, layer, e, x, k, cnt):
            streams.append((st, flat))
    tau = select_kth_desc([s[0][0] for s in streams], k)
    out = _best(_collect(streams, tau, cnt), k)
    cnt.reported += len(out)
    return out


def block_size(n: int) -> int:
    if n < 4:
        return 1
    return max(1, math.ceil(math.log2(math.log2(n))))


@dataclass
class BlockHeapResult:
    items: list[tuple[float, int, int]]  # (value, stream, position)
    extractions: int
    partial_extractions: int
    pool_size: int


def block_heap_topk(
    streams: Sequence[SortedStream], k: int, h: int, counters: Optional[Counters] = None
) -> BlockHeapResult:
    """k largest elements of non-increasing streams, read in blocks of h.

    A heap holds, per stream, the last element of its next unread block.
    Each extraction moves a whole block into the candidate set S and
    enqueues that stream's following block.  Once |S| >= k the blocks
    still waiting in the heap join S, and the answer is the
    k largest of that pool.
    """
    if h < 1:
        raise ValueError("block size must be at least 1")
    total = sum(len(s) for s in streams)
    if k < 1 or total < k:
        raise NotEnoughElements(f"fewer than {k} elements across {len(streams)} streams")
    cnt = counters if counters is not None else Counters()
    nxt = [0] * len(streams)
    heap: list = []

    def push(si: int) -> None:
        s = streams[si]
        start = nxt[si]
        if start >= len(s):
            return
        end = min(start + h, len(s))
        cnt.comparisons += _heap_cost(len(heap) + 1)
        heapq.heappush(heap, (-s.get(end - 1), si, start, end))

    for si in range(len(streams)):
        push(si)
    chosen: list[tuple[float, int, int]] = []
    extractions = partial = 0
    while heap and len(chosen) < k:
        cnt.comparisons += _heap_cost(len(heap))
        _, si, start, end = heapq.heappop(heap)
        extractions += 1
        if end - start < h:
            partial += 1
        s = streams[si]
        chosen.extend((s.get(t), si, t) for t in range(start, end))
        nxt[si] = end
        push(si)
    pool = list(chosen)
    for _, si, start, end in heap:
        pool.extend((streams[si].get(t), si, t) for t in range(start, end))
    pool.sort(key=lambda e: (-e[0], e[1], e[2]))
    cnt.extractions += extractions
    if debug_enabled():
        check(
            extractions - partial <= math.ceil(k / h),
            f"{extractions - partial} full block extractions exceed ceil({k}/{h})",
        )
    return BlockHeapResult(pool[:k], extractions, partial, len(pool))


def topk_block(
    index_or_sources, x: float, k: int, counters: Optional[Counters] = None, h: Optional[int] = None
) -> list[Hit]:
    """k highest lines at x via the block heap over layer tops.

    Stage one runs the block heap over each source's stream of layer
    tops to learn how many layers j_v of source v can hold answers.
    Stage two selects over the left/right streams of those layers.
    """
    sources = _sources(index_or_sources)
    total = sum(len(ix) for ix, _ in sources)
    _check_k(k, total)
    cnt = counters if counters is not None else Counters()
    if h is None:
        h = block_size(total)
    tops_seen: list[list[tuple[int, int]]] = []
    top_streams = []
    for s, (ix, pos) in enumerate(sources):
        it = ix.tops(x, cnt, pos)
        seen: list[tuple[int, int]] = []
        tops_seen.append(seen)

        def fetch(t, it=it, seen=seen, ix=ix):
            while len(seen) <= t:
                seen.append(next(it))
            layer, e = seen[t]
            return ix.layers[layer].height(e, x)

        top_streams.append(SortedStream(fetch, min(k, len(ix.layers)), cnt))
    res = block_heap_topk(top_streams, min(k, sum(len(t) for t in top_streams)), h, cnt)
    depth = [0] * len(sources)
    for _, si, t in res.items:
        depth[si] = max(depth[si], t + 1)
    streams = []
    for s, (ix, _) in enumerate(sources):
        for layer in range(depth[s]):
            _, e = tops_seen[s][layer]
            flat = ix.layers[layer].flat
            for st in _layer_streams(ix, layer, e, x, k, cnt):
                streams.append((st, flat))
    tau = select_kth_desc([s[0][0] for s in streams], k)
    out = _best(_collect(streams, tau, cnt), k)
    cnt.reported += len(out)
    return out
