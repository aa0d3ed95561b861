"""Fractional cascading over a forest of sorted catalogs.

Every node's augmented catalog is its own catalog merged with every
`stride`-th element of each child's augmented catalog.  A position in
a node (the number of augmented elements <= x) maps to a position in a
child through a bridge table plus a few forward steps, never more than
the child's sampling stride.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..counters import Counters


class FractionalCascade:
    def __init__(self, catalogs: Sequence[Sequence[float]], parent: Sequence[int]):
        n = len(catalogs)
        self.parent = list(parent)
        self.children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                self.children[p].append(v)
        self.aug: list[list[float]] = [[] for _ in range(n)]
        self.own: list[list[int]] = [[] for _ in range(n)]
        # bridge[c] maps a position in parent(c) to a lower bound in c
        self.bridge: list[list[int]] = [[] for _ in range(n)]
        aug_np: list[Optional[np.ndarray]] = [None] * n
        for v in self._postorder():
            stride = 2 * max(1, len(self.children[v]))
            parts = [np.asarray(catalogs[v], dtype=float)]
            for c in self.children[v]:
                parts.append(aug_np[c][stride - 1 :: stride])
            merged = np.sort(np.concatenate(parts), kind="mergesort")
            aug_np[v] = merged
            self.aug[v] = merged.tolist()
            own = np.searchsorted(np.asarray(catalogs[v], dtype=float), merged, side="right")
            self.own[v] = [0] + own.tolist()
            for c in self.children[v]:
                br = np.searchsorted(aug_np[c], merged, side="right")
                self.bridge[c] = [0] + br.tolist()
        self.max_steps = 2 * max((len(ch) for ch in self.children), default=1)

    def _postorder(self) -> list[int]:
        order: list[int] = []
        roots = [v for v, p in enumerate(self.parent) if p < 0]
        stack = [(r, False) for r in roots]
        while stack:
            v, done = stack.pop()
            if done:
                order.append(v)
                continue
            stack.append((v, True))
            for c in self.children[v]:
                stack.append((c, False))
        return order

    def search(self, v: int, x: float, counters: Optional[Counters] = None) -> int:
        """Position of x in node v's augmented catalog by binary search."""
        cat = self.aug[v]
        lo, hi = 0, len(cat)
        probes = 0
        while lo < hi:
            mid = (lo + hi) // 2
            probes += 1
            if cat[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        if counters is not None:
            counters.comparisons += probes
        return lo

    def follow(self, c: int, pos: int, x: float, counters: Optional[Counters] = None) -> int:
        """Position of x in child c, given the position `pos` in its parent."""
        q = self.bridge[c][pos]
        cat = self.aug[c]
        steps = 0
        while q < len(cat) and cat[q] <= x:
            q += 1
            steps += 1
        if counters is not None:
            counters.bridge_steps += steps + 1
        return q

    def own_index(self, v: int, pos: int) -> int:
        """Number of node v's own catalog elements <= x."""
        return self.own[v][pos]
