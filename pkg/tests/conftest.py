import pytest

from uqr.counters import debug_checks
from uqr.model import HistogramPdf, UncertainPoint, UniformPdf

INF = float("inf")


def d1_points():
    spans = [(0, 2), (0, 4), (1, 3), (1, 5), (2, 8)]
    return [UncertainPoint(i, UniformPdf(a, b)) for i, (a, b) in enumerate(spans, 1)]


def d2_points():
    return [
        UncertainPoint(1, HistogramPdf((0, 1, 3), (0.5, 0.25))),
        UncertainPoint(2, HistogramPdf((2, 4), (0.5,))),
        UncertainPoint(3, HistogramPdf((0, 2, 5, 6), (0.25, 0.0, 0.5))),
    ]


@pytest.fixture
def d1():
    return d1_points()


@pytest.fixture
def d2():
    return d2_points()


@pytest.fixture
def debug():
    with debug_checks():
        yield


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion and fail on FAIL."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def report(name: str, ok: bool, detail: str) -> None:
        line = f"criterion {name}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        lines.append(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
