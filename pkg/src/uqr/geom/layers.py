"""Envelope layers by iterative peeling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..counters import check, debug_enabled
from ..errors import EmptyInput
from .lines import EnvelopeChain, Line, crossing_x, group_lines, hull_pass

# below this many remaining groups a Python pass beats a qhull call
QHULL_MIN = 512


@dataclass
class LayerDecomposition:
    layers: list[EnvelopeChain]
    membership: dict[tuple[int, int], int]

    def __len__(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        return sum(len(c.flat) for c in self.layers)


def _upper_chain_qhull(a: np.ndarray, b: np.ndarray) -> list[int] | None:
    """Positions of the upper-hull vertices of points (a, b), left to right.

    The lines y = a*x + b on the upper envelope are exactly the upper
    hull vertices of their dual points.  Returns None when qhull cannot
    handle the input (for example all points collinear).
    """
    try:
        hull = ConvexHull(np.column_stack((a, b)))
    except (QhullError, ValueError):
        return None
    verts = hull.vertices.tolist()  # counter-clockwise in 2-D
    right = max(range(len(verts)), key=lambda i: (a[verts[i]], b[verts[i]]))
    left_v = min(verts, key=lambda v: (a[v], -b[v]))
    chain = []
    i = right
    while True:
        v = verts[i]
        chain.append(v)
        if v == left_v:
            break
        i = (i + 1) % len(verts)
    chain.reverse()
    return chain


def _breaks_for(groups, keep: list[int]) -> list[float]:
    breaks: list[float] = []
    for u, v in zip(keep, keep[1:]):
        x = crossing_x(groups[u][0], groups[v][0])
        if breaks and x < breaks[-1]:
            x = breaks[-1]
        breaks.append(x)
    return breaks


def _layer(groups, keep: list[int], layers: list[EnvelopeChain], membership: dict) -> None:
    chain = EnvelopeChain([groups[i] for i in keep], _breaks_for(groups, keep))
    depth = len(layers)
    for ln in chain.flat:
        membership[(ln.owner, ln.tag)] = depth
    layers.append(chain)


def _peel_small(groups) -> LayerDecomposition:
    rem = list(range(len(groups)))
    layers: list[EnvelopeChain] = []
    membership: dict[tuple[int, int], int] = {}
    while rem:
        pos, _ = hull_pass([groups[i] for i in rem])
        keep = [rem[i] for i in pos]
        _layer(groups, keep, layers, membership)
        taken = set(pos)
        rem = [g for i, g in enumerate(rem) if i not in taken]
    return LayerDecomposition(layers, membership)


def peel_layers(lines: Sequence[Line]) -> LayerDecomposition:
    """Layer i is the upper envelope of the lines left after removing layers < i.

    Lines are sorted once; remaining groups keep their sorted order, so
    each pass is linear (or one qhull call on large remainders).
    """
    if not lines:
        raise EmptyInput("cannot peel an empty line set")
    groups = group_lines(lines)
    d = _peel_small(groups) if len(groups) < QHULL_MIN else _peel_large(groups)
    if debug_enabled():
        _check_partition(lines, d)
    return d


def _check_partition(lines: Sequence[Line], d: LayerDecomposition) -> None:
    seen = sorted(id(ln) for chain in d.layers for ln in chain.flat)
    check(seen == sorted(id(ln) for ln in lines), "layers do not partition the input lines")
    for chain in d.layers:
        xs = chain.breaks
        check(all(a <= b for a, b in zip(xs, xs[1:])), "layer breakpoints decrease")


def _peel_large(groups: list[list[Line]]) -> LayerDecomposition:
    a_all = np.fromiter((g[0].slope for g in groups), float, len(groups))
    b_all = np.fromiter((g[0].intercept for g in groups), float, len(groups))
    rem = np.arange(len(groups))
    layers: list[EnvelopeChain] = []
    membership: dict[tuple[int, int], int] = {}
    while len(rem):
        pos = None
        if len(rem) >= QHULL_MIN:
            pos = _upper_chain_qhull(a_all[rem], b_all[rem])
        if pos is None:
            pos, _ = hull_pass([groups[i] for i in rem.tolist()])
        _layer(groups, rem[pos].tolist(), layers, membership)
        rem = np.delete(rem, pos)
    return LayerDecomposition(layers, membership)
