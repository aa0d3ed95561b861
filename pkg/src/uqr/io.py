"""Text formats for points, queries and results.

Points, one per line (`#` starts a comment):

    id u lo hi
    id h b_1 .. b_m | d_1 .. d_{m-1}

Queries, one per line: `top1 LO HI`, `topk LO HI K`, `thresh LO HI TAU`,
where LO and HI may be `-inf` / `+inf`.

Results, one line per query: `QID kind m id:prob ...` with 9 decimals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import UqrError
from .model import HistogramPdf, QueryInterval, UncertainPoint, UniformPdf

KINDS = ("top1", "topk", "thresh")


class ParseError(UqrError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Query:
    qid: int
    kind: str
    interval: QueryInterval
    param: Optional[float] = None  # k for topk, tau for thresh
    line: int = 0

    @property
    def k(self) -> int:
        return int(self.param)


def fmt_float(x: float) -> str:
    """Shortest text that parses back to x; integral values drop the '.0'."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _records(text: str) -> Iterable[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def _real(tok: str, no: int, what: str, allow_inf: bool = False) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(no, f"{what} {tok!r} is not a number") from None
    if math.isnan(v) or (math.isinf(v) and not allow_inf):
        raise ParseError(no, f"{what} {tok!r} must be finite")
    return v


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(no, f"{what} {tok!r} is not an integer") from None


def parse_points(text: str) -> list[UncertainPoint]:
    points: list[UncertainPoint] = []
    seen: set[int] = set()
    for no, toks in _records(text):
        if len(toks) < 2:
            raise ParseError(no, "expected 'id u lo hi' or 'id h breaks | densities'")
        pid = _int(toks[0], no, "id")
        if pid in seen:
            raise ParseError(no, f"duplicate id {pid}")
        kind = toks[1]
        try:
            if kind == "u":
                if len(toks) != 4:
                    raise ParseError(no, "uniform record needs 'id u lo hi'")
                pdf = UniformPdf(_real(toks[2], no, "lo"), _real(toks[3], no, "hi"))
            elif kind == "h":
                rest = toks[2:]
                if rest.count("|") != 1:
                    raise ParseError(no, "histogram record needs exactly one '|'")
                cut = rest.index("|")
                breaks = [_real(t, no, "break") for t in rest[:cut]]
                dens = [_real(t, no, "density") for t in rest[cut + 1 :]]
                pdf = HistogramPdf(tuple(breaks), tuple(dens))
            else:
                raise ParseError(no, f"unknown record kind {kind!r}")
        except ParseError:
            raise
        except UqrError as exc:
            raise ParseError(no, str(exc)) from None
        seen.add(pid)
        points.append(UncertainPoint(pid, pdf))
    return points


def format_point(p: UncertainPoint) -> str:
    pdf = p.pdf
    if isinstance(pdf, UniformPdf):
        return f"{p.id} u {fmt_float(pdf.lo)} {fmt_float(pdf.hi)}"
    breaks = " ".join(fmt_float(b) for b in pdf.breaks)
    dens = " ".join(fmt_float(d) for d in pdf.densities)
    return f"{p.id} h {breaks} | {dens}"


def format_points(points: Sequence[UncertainPoint]) -> str:
    return "".join(format_point(p) + "\n" for p in points)


def parse_queries(text: str) -> list[Query]:
    out: list[Query] = []
    for no, toks in _records(text):
        kind = toks[0]
        if kind not in KINDS:
            raise ParseError(no, f"unknown query kind {kind!r}")
        want = 3 if kind == "top1" else 4
        if len(toks) != want:
            raise ParseError(no, f"{kind} needs {want - 1} arguments")
        lo = _real(toks[1], no, "LO", allow_inf=True)
        hi = _real(toks[2], no, "HI", allow_inf=True)
        try:
            interval = QueryInterval(lo, hi)
        except UqrError as exc:
            raise ParseError(no, str(exc)) from None
        param = None
        if kind == "topk":
            param = float(_int(toks[3], no, "K"))
        elif kind == "thresh":
            param = _real(toks[3], no, "TAU")
        out.append(Query(len(out) + 1, kind, interval, param, no))
    return out


def format_query(q: Query) -> str:
    lo, hi = q.interval.lo, q.interval.hi
    parts = [q.kind, "-inf" if lo == -math.inf else fmt_float(lo), "+inf" if hi == math.inf else fmt_float(hi)]
    if q.kind == "topk":
        parts.append(str(q.k))
    elif q.kind == "thresh":
        parts.append(fmt_float(q.param))
    return " ".join(parts)


def format_result(qid: int, kind: str, items: Sequence[tuple[int, float]]) -> str:
    body = "".join(f" {i}:{p:.9f}" for i, p in items)
    return f"{qid} {kind} {len(items)}{body}"
