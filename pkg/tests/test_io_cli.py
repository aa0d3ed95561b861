import io
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uqr.cli import BENCH_HEADER, EXIT_CAPABILITY, EXIT_OK, EXIT_PARSE, main
from uqr.generators import random_histogram_points, random_uniform_points
from uqr.io import ParseError, format_points, format_query, parse_points, parse_queries

FIX = Path(__file__).parent / "fixtures"


def run(args, capsys):
    err = io.StringIO()
    code = main(args, stderr=err)
    return code, capsys.readouterr().out, err.getvalue()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_points_round_trip(seed, uniform):
    rng = random.Random(seed)
    pts = random_uniform_points(8, rng) if uniform else random_histogram_points(8, 3, rng)
    back = parse_points(format_points(pts))
    assert [(p.id, p.pdf) for p in back] == [(p.id, p.pdf) for p in pts]


def test_query_round_trip():
    text = "top1 -inf 3\ntopk 1 2.5 4\nthresh 0 +inf 0.25\n"
    qs = parse_queries(text)
    assert "".join(format_query(q) + "\n" for q in qs) == text
    assert [q.qid for q in qs] == [1, 2, 3]


@pytest.mark.parametrize(
    "text,line",
    [
        ("1 u 0 1\n1 u 0 2\n", 2),
        ("# c\n1 u 2 1\n", 2),
        ("1 h 0 1 | 0.5\n", 1),
        ("1 x 0 1\n", 1),
        ("1 h 0 1 2 0.5 0.5\n", 1),
    ],
)
def test_point_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_points(text)
    assert exc.value.line == line


def test_query_parse_errors():
    with pytest.raises(ParseError):
        parse_queries("top1 3 1\n")
    with pytest.raises(ParseError):
        parse_queries("topk 0 1 two\n")
    with pytest.raises(ParseError):
        parse_queries("near 0 1\n")


def test_cli_query_output(tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("topk -inf 3 2\nthresh 1 3 0.5\ntop1 1 3\n")
    code, out, _ = run(["query", "--points", str(FIX / "d1.txt"), "--queries", str(q)], capsys)
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "1 topk 2 1:1.000000000 3:1.000000000"
    assert lines[1].startswith("2 thresh 4 ")
    assert lines[2] == "3 top1 1 3:1.000000000"


def test_cli_capability_and_parse_exit_codes(tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("top1 1 3\n")
    code, _, err = run(["query", "--points", str(FIX / "d1.txt"), "--queries", str(q), "--index", "uu"], capsys)
    assert code == EXIT_CAPABILITY and "line 1" in err
    code, _, _ = run(["query", "--points", str(FIX / "d2.txt"), "--queries", str(q), "--index", "ub"], capsys)
    assert code == EXIT_CAPABILITY
    q.write_text("top1 1 3\ntopk 1 3 99\n")
    code, _, err = run(["query", "--points", str(FIX / "d1.txt"), "--queries", str(q)], capsys)
    assert code == EXIT_PARSE and "line 2" in err
    q.write_text("top1 1\n")
    code, _, err = run(["query", "--points", str(FIX / "d1.txt"), "--queries", str(q)], capsys)
    assert code == EXIT_PARSE and "line 1" in err
    code, _, _ = run(["query", "--points", "rand-hist:x:2", "--queries", str(q)], capsys)
    assert code == EXIT_PARSE


def test_cli_validate(capsys):
    code, out, _ = run(["validate", "--points", str(FIX / "d1.txt"), "--queries", "20", "--seed", "3"], capsys)
    assert code == EXIT_OK
    assert [ln.split(":")[0] for ln in out.splitlines()] == ["uu", "ub", "hu", "hb"]
    code, out, _ = run(["validate", "--points", "rand-hist:40:3", "--queries", "10"], capsys)
    assert code == EXIT_OK and "FAIL" not in out


def test_cli_bench_is_reproducible(capsys):
    args = ["bench", "--points", "rand-uniform:8", "--n", "16,32", "--queries", "5", "--no-timing", "--seed", "4"]
    code, first, _ = run(args, capsys)
    _, second, _ = run(args, capsys)
    assert code == EXIT_OK
    assert first == second
    rows = first.splitlines()
    assert rows[0] == BENCH_HEADER
    assert all(len(r.split(",")) == len(BENCH_HEADER.split(",")) for r in rows)


def test_cli_same_seed_same_bytes(tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("topk 0 5 3\ntop1 -inf 4\n")
    args = ["query", "--points", "rand-uniform:50", "--queries", str(q), "--seed", "9"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b and a
