"""Operation counters and the debug-check switch.

Counters are plain integers bumped by the query code.  They are the
measurement behind the bench harness: `comparisons` counts key
comparisons (binary-search probes, heap sifts, threshold tests),
`accesses` counts distinct stream element reads, `bridge_steps` counts
the forward steps taken after following a cascade bridge.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass, fields

from .errors import InvariantViolation


@dataclass
class Counters:
    comparisons: int = 0
    accesses: int = 0
    bridge_steps: int = 0
    reported: int = 0
    extractions: int = 0
    layers_visited: int = 0

    def add(self, other: "Counters") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_debug = os.environ.get("UQR_DEBUG", "") not in ("", "0")


def debug_enabled() -> bool:
    return _debug


def set_debug(flag: bool) -> None:
    global _debug
    _debug = bool(flag)


@contextlib.contextmanager
def debug_checks(flag: bool = True):
    """Temporarily switch structural self-checks on (or off)."""
    global _debug
    old = _debug
    _debug = bool(flag)
    try:
        yield
    finally:
        _debug = old


_checks_run = 0


def checks_run() -> int:
    """Number of debug checks evaluated so far in this process."""
    return _checks_run


def check(cond: bool, message: str) -> None:
    global _checks_run
    _checks_run += 1
    if not cond:
        raise InvariantViolation(message)
