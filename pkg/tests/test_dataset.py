import io

import pytest

from murmur_rank.ap_engine import ap_batch
from murmur_rank.dataset import (
    CSV_COLUMNS,
    CurveRecord,
    conductor_windows,
    filter_conductor,
    load_curves,
    parse_allcurves,
    parse_curves,
    serialize_curves,
    split_by_rank,
    weierstrass_invariants,
)
from murmur_rank.errors import CurveValidationError, InvalidArgumentError, ParseError
from murmur_rank.primes import sieve

HEADER = ",".join(CSV_COLUMNS)


def test_sample_loads(sample_records):
    assert len(sample_records) == 25
    groups = split_by_rank(sample_records)
    assert len(groups[0]) == 14
    assert len(groups[1]) == 11
    assert sample_records[0].label == "11a1"


def test_invariants_of_11a1():
    inv = weierstrass_invariants(0, -1, 1, -10, -20)
    assert inv["c4"] == 496
    assert inv["c6"] == 20008
    assert inv["disc"] == -161051


def test_record_discriminants(sample_records):
    by_label = {r.label: r for r in sample_records}
    assert by_label["11a1"].discriminant == -161051
    assert by_label["37a1"].discriminant == 37
    assert by_label["36a1"].discriminant == -432
    assert by_label["30a1"].bad_primes == frozenset({2, 3, 5})


def test_comments_and_blank_lines_skipped():
    text = f"# comment\n\n{HEADER}\n  # another\n11a1,0,-1,1,-10,-20,11,0\n\n"
    (rec,) = parse_curves(text)
    assert rec.ainvs == (0, -1, 1, -10, -20)
    assert rec.conductor == 11 and rec.rank == 0


def test_file_like_input():
    stream = io.StringIO(f"{HEADER}\n37a1,0,0,1,-1,0,37,1\n")
    (rec,) = parse_curves(stream)
    assert rec.label == "37a1" and rec.rank == 1


def test_missing_header():
    with pytest.raises(ParseError, match="line 1"):
        parse_curves("11a1,0,-1,1,-10,-20,11,0\n")


def test_empty_input():
    with pytest.raises(ParseError):
        parse_curves("# nothing here\n")


def test_parse_error_reports_original_line():
    text = f"# c\n{HEADER}\n11a1,0,-1,1,-10,-20,11,0\n37a1,0,0,1,x,0,37,1\n"
    with pytest.raises(ParseError, match="line 4"):
        parse_curves(text)


def test_wrong_field_count():
    with pytest.raises(ParseError, match="line 2"):
        parse_curves(f"{HEADER}\n11a1,0,-1,1,-10,11,0\n")


@pytest.mark.parametrize(
    "row, message",
    [
        ("bad,0,-1,1,-10,-20,11,2", "rank"),
        ("bad,0,-1,1,-10,-20,0,0", "conductor"),
        ("bad,0,0,0,0,0,1,0", "singular"),
        ("bad,0,-1,1,-10,-20,13,0", "does not divide"),
    ],
)
def test_record_validation(row, message):
    with pytest.raises(CurveValidationError, match=message) as info:
        parse_curves(f"{HEADER}\n{row}\n")
    assert info.value.line == 2
    assert info.value.label == "bad"


def test_serialize_then_parse(sample_records):
    assert parse_curves(serialize_curves(sample_records)) == sample_records


ALLCURVES_ROWS = """\
11 a 1 [0,-1,1,-10,-20] 0 5
11 a 2 [0,-1,1,-7820,-263580] 0 1
11 a 3 [0,-1,1,0,0] 0 5

37 a 1 [0,0,1,-1,0] 1 1
37 b 1 [0,1,1,-23,-50] 0 3
389 a 1 [0,1,1,-2,0] 2 1
"""


def test_parse_allcurves():
    records = parse_allcurves(ALLCURVES_ROWS)
    assert [r.label for r in records] == ["11a1", "11a2", "11a3", "37a1", "37b1"]
    assert records[0] == CurveRecord("11a1", 0, -1, 1, -10, -20, 11, 0)
    assert [r.rank for r in records] == [0, 0, 0, 1, 0]

    first = parse_allcurves(ALLCURVES_ROWS, first_in_class=True)
    assert [r.label for r in first] == ["11a1", "37a1", "37b1"]
    assert [r.label for r in parse_allcurves(ALLCURVES_ROWS, ranks=(1,))] == ["37a1"]


def test_parse_allcurves_bad_row():
    with pytest.raises(ParseError, match="line 2"):
        parse_allcurves("11 a 1 [0,-1,1,-10,-20] 0 5\n11 a 2 0,-1,1 0 1\n")
    with pytest.raises(ParseError, match="five coefficients"):
        parse_allcurves("11 a 1 [0,-1,1,-10] 0 5\n")


def test_isogenous_curves_share_ap():
    table = sieve(400)
    rows = ap_batch(parse_allcurves(ALLCURVES_ROWS)[:3], table)
    assert rows[0].ap.tolist() == rows[1].ap.tolist() == rows[2].ap.tolist()


def test_load_missing_file(tmp_path):
    with pytest.raises(InvalidArgumentError):
        load_curves(str(tmp_path / "missing.csv"))


def test_load_rejects_non_utf8(tmp_path):
    path = tmp_path / "latin1.csv"
    path.write_bytes(f"{HEADER}\n11a1,0,-1,1,-10,-20,11,0\n\xff37a1,0,0,1,-1,0,37,1\n".encode("latin-1"))
    with pytest.raises(ParseError, match="UTF-8") as info:
        load_curves(str(path))
    assert info.value.line == 3


def test_filter_conductor_is_inclusive(sample_records):
    window = filter_conductor(sample_records, 37, 57)
    assert [r.label for r in window] == ["37a1", "43a1", "53a1", "57a1"]
    with pytest.raises(InvalidArgumentError):
        filter_conductor(sample_records, 10, 5)


def test_conductor_windows_cover_range():
    windows = conductor_windows(100, 1_000)
    assert windows[0] == (100, 200)
    assert windows[-1][1] == 1_000
    for (_, hi), (lo, _) in zip(windows, windows[1:]):
        assert lo == hi + 1


def test_record_is_hashable_and_comparable():
    a = CurveRecord("11a1", 0, -1, 1, -10, -20, 11, 0)
    b = CurveRecord("11a1", 0, -1, 1, -10, -20, 11, 0)
    assert a == b
    assert len({a, b}) == 1
