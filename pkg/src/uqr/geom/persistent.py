"""Persistent upper envelope of lines under insertion (path-copying treap).

The envelope's lines are kept in a treap keyed by slope.  Inserting a
line copies only the nodes on the paths it touches, so every earlier
version stays valid and queryable.
"""

from __future__ import annotations

import random
from typing import Optional

from .lines import Line, _removable


class _Node:
    __slots__ = ("line", "prio", "left", "right", "lmost", "rmost", "size")

    def __init__(self, line: Line, prio: float, left: "Optional[_Node]", right: "Optional[_Node]"):
        self.line = line
        self.prio = prio
        self.left = left
        self.right = right
        self.lmost = left.lmost if left is not None else line
        self.rmost = right.rmost if right is not None else line
        self.size = 1 + (left.size if left else 0) + (right.size if right else 0)


def _with(node: _Node, left, right) -> _Node:
    return _Node(node.line, node.prio, left, right)


def _split(t: Optional[_Node], slope: float):
    """(keys < slope, keys >= slope), copying the search path."""
    if t is None:
        return None, None
    if t.line.slope < slope:
        a, b = _split(t.right, slope)
        return _with(t, t.left, a), b
    a, b = _split(t.left, slope)
    return a, _with(t, b, t.right)


def _merge(a: Optional[_Node], b: Optional[_Node]) -> Optional[_Node]:
    if a is None:
        return b
    if b is None:
        return a
    if a.prio > b.prio:
        return _with(a, a.left, _merge(a.right, b))
    return _with(b, _merge(a, b.left), b.right)


def _insert(t: Optional[_Node], node: _Node) -> _Node:
    a, b = _split(t, node.line.slope)
    return _merge(_merge(a, node), b)


def _delete(t: Optional[_Node], slope: float) -> Optional[_Node]:
    if t is None:
        return None
    if slope < t.line.slope:
        return _with(t, _delete(t.left, slope), t.right)
    if slope > t.line.slope:
        return _with(t, t.left, _delete(t.right, slope))
    return _merge(t.left, t.right)


def _find(t: Optional[_Node], slope: float) -> Optional[Line]:
    while t is not None:
        if slope == t.line.slope:
            return t.line
        t = t.left if slope < t.line.slope else t.right
    return None


def _pred(t: Optional[_Node], slope: float) -> Optional[Line]:
    best = None
    while t is not None:
        if t.line.slope < slope:
            best = t.line
            t = t.right
        else:
            t = t.left
    return best


def _succ(t: Optional[_Node], slope: float) -> Optional[Line]:
    best = None
    while t is not None:
        if t.line.slope > slope:
            best = t.line
            t = t.left
        else:
            t = t.right
    return best


class PersistentEnvelope:
    """Versioned upper envelopes; version v is the envelope of the first v inserts."""

    def __init__(self, seed: int = 0):
        self._rng = random.Random(seed)
        self.versions: list[Optional[_Node]] = [None]

    def insert(self, line: Line) -> None:
        root = self.versions[-1]
        root = self._insert_line(root, line)
        self.versions.append(root)

    def _insert_line(self, root: Optional[_Node], line: Line) -> Optional[_Node]:
        same = _find(root, line.slope)
        if same is not None:
            if same.intercept >= line.intercept:
                return root
            root = _delete(root, line.slope)
        pred = _pred(root, line.slope)
        succ = _succ(root, line.slope)
        if pred is not None and succ is not None and _removable(pred, line, succ):
            return root
        while pred is not None:
            pp = _pred(root, pred.slope)
            if pp is None or not _removable(pp, pred, line):
                break
            root = _delete(root, pred.slope)
            pred = pp
        while succ is not None:
            ss = _succ(root, succ.slope)
            if ss is None or not _removable(line, succ, ss):
                break
            root = _delete(root, succ.slope)
            succ = ss
        return _insert(root, _Node(line, self._rng.random(), None, None))

    @staticmethod
    def lines(root: Optional[_Node]) -> list[Line]:
        out: list[Line] = []

        def walk(t):
            if t is None:
                return
            walk(t.left)
            out.append(t.line)
            walk(t.right)

        walk(root)
        return out

    def query(self, version: int, x: float, counters=None) -> Optional[Line]:
        """Line of the version's envelope that is highest at x."""
        t = self.versions[version]
        pred_anc: Optional[Line] = None
        succ_anc: Optional[Line] = None
        steps = 0
        while t is not None:
            m = t.line
            p = t.left.rmost if t.left is not None else pred_anc
            s = t.right.lmost if t.right is not None else succ_anc
            hm = m.at(x)
            steps += 1
            if s is not None and s.at(x) > hm:
                pred_anc = m
                t = t.right
            elif p is not None and p.at(x) > hm:
                succ_anc = m
                t = t.left
            else:
                if counters is not None:
                    counters.comparisons += 2 * steps
                return m
        if counters is not None:
            counters.comparisons += 2 * steps
        return None
