"""Binary trees whose nodes hold layered half-plane indexes.

The first layers of all node indexes form one cascade along the tree,
so a query pays a single binary search at the root and then follows
bridges down to every node it touches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .counters import Counters
from .geom.cascade import FractionalCascade
from .geom.layers import peel_layers
from .geom.lines import Line
from .halfplane import LayeredHalfplaneIndex, Source


@dataclass
class RangeShape:
    """Complete binary tree over positions [0, m); node 0 is the root."""

    m: int
    lo: list[int] = field(default_factory=list)
    hi: list[int] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.m <= 0:
            return
        stack = [(0, self.m, -1, None)]
        while stack:
            lo, hi, par, side = stack.pop()
            v = len(self.lo)
            self.lo.append(lo)
            self.hi.append(hi)
            self.left.append(-1)
            self.right.append(-1)
            self.parent.append(par)
            if par >= 0:
                (self.left if side == 0 else self.right)[par] = v
            if hi - lo > 1:
                mid = (lo + hi) // 2
                stack.append((mid, hi, v, 1))
                stack.append((lo, mid, v, 0))

    def __len__(self) -> int:
        return len(self.lo)

    def mid(self, v: int) -> int:
        return (self.lo[v] + self.hi[v]) // 2

    def canonical(self, a: int, b: int) -> list[int]:
        """Nodes whose ranges partition [a, b)."""
        out = []
        if a >= b or self.m <= 0:
            return out
        stack = [0]
        while stack:
            v = stack.pop()
            lo, hi = self.lo[v], self.hi[v]
            if b <= lo or hi <= a:
                continue
            if a <= lo and hi <= b:
                out.append(v)
                continue
            stack.append(self.right[v])
            stack.append(self.left[v])
        return out

    def leaf_path(self, i: int) -> list[int]:
        """Root-to-leaf node list for position i."""
        path = [0]
        v = 0
        while self.hi[v] - self.lo[v] > 1:
            v = self.left[v] if i < self.mid(v) else self.right[v]
            path.append(v)
        return path


class LayeredTree:
    """A `RangeShape` with a layered half-plane index per node."""

    def __init__(self, shape: RangeShape, node_lines: Sequence[Sequence[Line]]):
        self.shape = shape
        catalogs: list[list[float]] = []
        parents: list[int] = []
        self.cat: list[int] = []
        decomps = []
        for v in range(len(shape)):
            lines = node_lines[v]
            decomp = peel_layers(lines) if lines else None
            decomps.append(decomp)
            first = len(catalogs)
            self.cat.append(first)
            par = shape.parent[v]
            parents.append(self.cat[par] if par >= 0 else -1)
            layers = decomp.layers if decomp is not None else []
            catalogs.append(layers[0].breaks if layers else [])
            for i in range(1, len(layers)):
                catalogs.append(layers[i].breaks)
                parents.append(first + i - 1)
        self.cascade = FractionalCascade(catalogs, parents)
        self.index = []
        for v, decomp in enumerate(decomps):
            nl = len(decomp.layers) if decomp is not None else 0
            self.index.append(
                LayeredHalfplaneIndex(decomp, self.cascade, list(range(self.cat[v], self.cat[v] + nl)))
            )

    def _pos(self, v: int, parent_pos: Optional[int], x: float, cnt: Optional[Counters]) -> int:
        if parent_pos is None:
            return self.cascade.search(self.cat[v], x, cnt)
        return self.cascade.follow(self.cat[v], parent_pos, x, cnt)

    def range_sources(self, a: int, b: int, x: float, cnt: Optional[Counters] = None) -> list[Source]:
        """Canonical nodes of [a, b) with their cascade positions at x.

        Positions flow from the root along the search paths, one bridge
        per edge.
        """
        sh = self.shape
        out: list[Source] = []
        if a >= b:
            return out
        stack: list[tuple[int, Optional[int]]] = [(0, None)]
        while stack:
            v, ppos = stack.pop()
            lo, hi = sh.lo[v], sh.hi[v]
            if b <= lo or hi <= a:
                continue
            pos = self._pos(v, ppos, x, cnt)
            if a <= lo and hi <= b:
                if len(self.index[v]):
                    out.append((self.index[v], pos))
                continue
            stack.append((sh.right[v], pos))
            stack.append((sh.left[v], pos))
        return out

    def path_sources(self, leaf: int, x: float, cnt: Optional[Counters] = None) -> list[Source]:
        """Every non-empty node on the root-to-leaf path, with positions."""
        out: list[Source] = []
        pos = None
        for v in self.shape.leaf_path(leaf):
            pos = self._pos(v, pos, x, cnt)
            if len(self.index[v]):
                out.append((self.index[v], pos))
        return out
