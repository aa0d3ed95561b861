"""Upper envelope of planes z = a*x + b*y + c over a box, with point location.

The envelope is the boundary of the halfspace intersection z >= plane_i
(capped above by the box).  Projecting each plane's facet gives a
convex subdivision of the box; a slab decomposition over the vertex
x-coordinates answers "which plane is highest at (x, y)" with two
binary searches.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Optional

import numpy as np
from scipy.spatial import HalfspaceIntersection, QhullError

from ..counters import Counters


class ProjectedPlaneEnvelope:
    """Point location in the projected upper envelope of planes.

    `a`, `b`, `c` are coefficient arrays and `box` is (x0, x1, y0, y1).
    Identical planes keep only their first occurrence.  Queries outside
    the box, and sets where the halfspace intersection degenerates, fall
    back to scanning all planes.
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, c: np.ndarray, box: tuple[float, float, float, float]):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.box = box
        self.slab_x: list[float] = []
        # per slab: cell ids bottom to top and the lower boundary line of each
        self.slab_cells: list[list[int]] = []
        self.slab_lo: list[list[tuple[float, float]]] = []
        self.ok = False
        if len(self.a):
            self._build()

    def _build(self) -> None:
        x0, x1, y0, y1 = self.box
        coef = np.stack([self.a, self.b, self.c], axis=1)
        _, keep = np.unique(coef, axis=0, return_index=True)
        keep = np.sort(keep)
        a, b, c = self.a[keep], self.b[keep], self.c[keep]
        corners = np.array([[x0, y0], [x0, y1], [x1, y0], [x1, y1]])
        zc = corners @ np.stack([a, b]) + c
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        zmid = float(np.max(a * xm + b * ym + c))
        ztop = max(float(zc.max()), zmid) + 1.0
        m = len(a)
        hs = np.zeros((m + 5, 4))
        hs[:m] = np.stack([a, b, -np.ones(m), c], axis=1)
        hs[m:] = [[-1, 0, 0, x0], [1, 0, 0, -x1], [0, -1, 0, y0], [0, 1, 0, -y1], [0, 0, 1, -ztop]]
        interior = np.array([xm, ym, (zmid + ztop) / 2])
        try:
            inter = HalfspaceIntersection(hs, interior)
        except (QhullError, ValueError):
            return
        verts = inter.intersections
        cells: dict[int, list[int]] = {}
        for vi, facet in enumerate(inter.dual_facets):
            for h in facet:
                if h < m:
                    cells.setdefault(int(h), []).append(vi)
        edges_by_cell = {}
        xs_all = set()
        for h, vids in cells.items():
            pts = np.unique(np.round(verts[vids][:, :2], 12), axis=0)
            if len(pts) < 3:
                continue
            ctr = pts.mean(axis=0)
            ang = np.arctan2(pts[:, 1] - ctr[1], pts[:, 0] - ctr[0])
            poly = pts[np.argsort(ang)]
            lower = []
            for p, q in zip(poly, np.roll(poly, -1, axis=0)):
                # counter-clockwise: edges running left to right bound the cell below
                if q[0] > p[0]:
                    lower.append((float(p[0]), float(p[1]), float(q[0]), float(q[1])))
            if not lower:
                continue
            edges_by_cell[int(keep[h])] = lower
            xs_all.update(float(v) for v in poly[:, 0])
        if not edges_by_cell:
            return
        self.slab_x = sorted(xs_all)
        nslab = len(self.slab_x) - 1
        per_slab: list[list[tuple[float, int, float, float]]] = [[] for _ in range(nslab)]
        for cell, lower in edges_by_cell.items():
            for px, py, qx, qy in lower:
                slope = (qy - py) / (qx - px)
                icpt = py - slope * px
                s0 = bisect_right(self.slab_x, px) - 1
                s1 = bisect_right(self.slab_x, qx) - 1
                for s in range(max(s0, 0), min(s1, nslab)):
                    mid = (self.slab_x[s] + self.slab_x[s + 1]) / 2
                    per_slab[s].append((slope * mid + icpt, cell, slope, icpt))
        for entries in per_slab:
            entries.sort()
            self.slab_cells.append([e[1] for e in entries])
            self.slab_lo.append([(e[2], e[3]) for e in entries])
        self.ok = True

    def _scan(self, x: float, y: float, cnt: Optional[Counters]) -> int:
        if cnt is not None:
            cnt.comparisons += len(self.a)
        return int(np.argmax(self.a * x + self.b * y + self.c))

    def locate(self, x: float, y: float, cnt: Optional[Counters] = None) -> int:
        """Index of a plane that is highest at (x, y), up to rounding."""
        x0, x1, y0, y1 = self.box
        if not self.ok or not (x0 <= x <= x1 and y0 <= y <= y1):
            return self._scan(x, y, cnt)
        s = bisect_right(self.slab_x, x) - 1
        s = min(max(s, 0), len(self.slab_cells) - 1)
        lows = self.slab_lo[s]
        lo, hi = 0, len(lows)
        steps = 0
        # last cell whose lower boundary is at or below y
        while hi - lo > 1:
            mid = (lo + hi) // 2
            steps += 1
            slope, icpt = lows[mid]
            if slope * x + icpt <= y:
                lo = mid
            else:
                hi = mid
        if cnt is not None:
            cnt.comparisons += steps + max(1, len(self.slab_x).bit_length())
        if not self.slab_cells[s]:
            return self._scan(x, y, cnt)
        return self.slab_cells[s][lo]
