import csv
import io
import logging
import math
import os
import re
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CurveValidationError, InvalidArgumentError, ParseError
from .primes import prime_factors

# --------------------------------------------------
# --- CSV SCHEMA ---
# --------------------------------------------------
CSV_COLUMNS = ["label", "a1", "a2", "a3", "a4", "a6", "conductor", "rank"]
ALLOWED_RANKS = (0, 1)


def weierstrass_invariants(a1, a2, a3, a4, a6):
    """Standard b2, b4, b6, b8, c4, c6 and discriminant of a long Weierstrass model."""
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return {"b2": b2, "b4": b4, "b6": b6, "b8": b8, "c4": c4, "c6": c6, "disc": disc}


@dataclass(frozen=True)
class CurveRecord:
    label: str
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    rank: int
    discriminant: int = field(init=False, compare=False)

    def __post_init__(self):
        inv = weierstrass_invariants(*self.ainvs)
        object.__setattr__(self, "discriminant", inv["disc"])

    @property
    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @cached_property
    def c_invariants(self):
        inv = weierstrass_invariants(*self.ainvs)
        return inv["c4"], inv["c6"]

    @cached_property
    def bad_primes(self):
        return frozenset(prime_factors(self.conductor))

    def is_good(self, p):
        return self.conductor % p != 0

    def validate(self, line=None):
        if self.conductor <= 0:
            raise CurveValidationError(
                f"conductor must be positive, got {self.conductor}", self.label, line
            )
        if self.rank not in ALLOWED_RANKS:
            raise CurveValidationError(
                f"rank must be 0 or 1, got {self.rank}", self.label, line
            )
        if self.discriminant == 0:
            raise CurveValidationError("singular model (discriminant 0)", self.label, line)
        for p in self.bad_primes:
            if self.discriminant % p != 0:
                raise CurveValidationError(
                    f"conductor prime {p} does not divide the discriminant {self.discriminant}",
                    self.label,
                    line,
                )
        return self


def _parse_int(value, column, line):
    try:
        return int(value.strip())
    except (AttributeError, ValueError):
        raise ParseError(f"column '{column}' is not an integer: {value!r}", line) from None


def parse_curves(stream):
    """Parse and validate the labelled curve CSV.

    `stream` is either the CSV text itself or a file-like object. Lines whose
    first non-blank character is '#' and blank lines are skipped; line numbers
    in errors refer to the original input.
    """
    text = stream if isinstance(stream, str) else stream.read()

    numbered = [
        (n, line)
        for n, line in enumerate(text.splitlines(), 1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbered:
        raise ParseError("input is empty (a header row is required)", 1)

    header_line, header = numbered[0]
    columns = [c.strip() for c in next(csv.reader([header]))]
    if columns != CSV_COLUMNS:
        raise ParseError(
            f"header must be {','.join(CSV_COLUMNS)}, got {','.join(columns)}", header_line
        )

    records = []
    for line_no, line in numbered[1:]:
        row = next(csv.reader([line]))
        if len(row) != len(CSV_COLUMNS):
            raise ParseError(
                f"expected {len(CSV_COLUMNS)} fields, got {len(row)}", line_no
            )
        values = dict(zip(CSV_COLUMNS, row))
        rec = CurveRecord(
            label=values["label"].strip(),
            **{c: _parse_int(values[c], c, line_no) for c in CSV_COLUMNS[1:]},
        )
        records.append(rec.validate(line_no))

    logging.debug(f"Parsed {len(records)} curve records")
    return records


def serialize_curves(records):
    """Inverse of parse_curves: CSV text with the required header."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([r.label, *r.ainvs, r.conductor, r.rank])
    return buf.getvalue()


ALLCURVES_ROW = re.compile(r"^\s*(\d+)\s+([a-z]+)\s+(\d+)\s+\[([-\d,\s]+)\]\s+(\d+)(?:\s+(\d+))?\s*$")


def parse_allcurves(text, ranks=ALLOWED_RANKS, first_in_class=False):
    """Records from a Cremona `allcurves` table.

    Rows read `N class number [a1,a2,a3,a4,a6] rank torsion`. Curves whose rank
    is not in `ranks` are dropped. With first_in_class only curve 1 of each
    isogeny class is kept; isogenous curves share every a_p.
    """
    records = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = ALLCURVES_ROW.match(line)
        if m is None:
            raise ParseError(f"not an allcurves row: {line.strip()!r}", line_no)
        N, iso, num, ainvs, rank, _ = m.groups()
        if int(rank) not in ranks or (first_in_class and num != "1"):
            continue
        coeffs = [int(a) for a in ainvs.split(",") if a.strip()]
        if len(coeffs) != 5:
            raise ParseError(f"expected five coefficients, got {len(coeffs)}", line_no)
        rec = CurveRecord(f"{N}{iso}{num}", *coeffs, conductor=int(N), rank=int(rank))
        records.append(rec.validate(line_no))

    logging.debug(f"Parsed {len(records)} allcurves rows")
    return records


def load_curves(path):
    if not os.path.exists(path):
        raise InvalidArgumentError(f"Dataset not found: {path}")
    with open(path, "rb") as f:
        raw = f.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line = raw[: e.start].count(b"\n") + 1
        raise ParseError(f"{path}: not valid UTF-8 ({e.reason})", line) from None
    records = parse_curves(text)
    logging.info(f"Loaded {len(records)} curves from {path}")
    return records


def filter_conductor(records, lo, hi):
    """Records with lo <= N <= hi, in input order."""
    if lo > hi:
        raise InvalidArgumentError(f"empty conductor window [{lo}, {hi}]")
    return [r for r in records if lo <= r.conductor <= hi]


def split_by_rank(records):
    groups = {rank: [] for rank in ALLOWED_RANKS}
    for r in records:
        groups[r.rank].append(r)
    return groups


def conductor_windows(lo, hi, width_factor=10.0):
    """Consecutive windows [N, N + width_factor*sqrt(N)] covering [lo, hi]."""
    if lo > hi:
        raise InvalidArgumentError(f"empty conductor range [{lo}, {hi}]")
    windows = []
    start = lo
    while start <= hi:
        end = min(hi, start + max(1, int(width_factor * math.sqrt(start))))
        windows.append((start, end))
        start = end + 1
    return windows
