"""Checks on the conductor window [7500, 10000].

Run src/0_curve_extract.py once to build data/curves_7500_10000.csv.
"""

import os

import numpy as np
import pytest

from murmur_rank.ap_engine import ap_batch
from murmur_rank.classifier import accuracy_by_B
from murmur_rank.config import PROFILE_DATASET, PROFILE_WINDOW
from murmur_rank.dataset import filter_conductor, load_curves, split_by_rank
from murmur_rank.fx import empirical_maxima
from murmur_rank.nagao import ap_average_profile, family_average, geometric_grid, sb_traces
from murmur_rank.primes import sieve

WORKERS = int(os.environ.get("MURMUR_RANK_WORKERS", "4"))
N_REF = PROFILE_WINDOW[0]

pytestmark = pytest.mark.skipif(
    not os.path.exists(PROFILE_DATASET), reason=f"{PROFILE_DATASET} not built"
)


@pytest.fixture(scope="module")
def window_run():
    records = filter_conductor(load_curves(PROFILE_DATASET), *PROFILE_WINDOW)
    table = sieve(2 * N_REF + 1_000)
    ap_rows = ap_batch(records, table, workers=WORKERS)
    traces = sb_traces(records, geometric_grid(float(table.limit), ratio=1.02), table, ap_rows=ap_rows)
    return records, table, traces, ap_rows


def test_both_ranks_present(window_run):
    records, *_ = window_run
    groups = split_by_rank(records)
    assert groups[0] and groups[1]


def test_first_crest_beats_larger_B(window_run):
    records, _, traces, ap_rows = window_run
    crest, large = accuracy_by_B(traces, records, (0.08 * N_REF, 12_500), ap_rows=ap_rows)
    assert crest.accuracy > large.accuracy


def test_mean_difference_crests(window_run):
    records, _, traces, _ = window_run
    families = family_average(traces, [r.rank for r in records])
    peaks = empirical_maxima(families, N_REF, window=9)
    assert any(abs(x - 0.08) <= 0.03 for x in peaks)
    assert any(abs(x - 0.65) <= 0.10 for x in peaks)


def test_profile_starts_with_rank0_above(window_run):
    records, table, _, ap_rows = window_run
    profile = ap_average_profile(records, table, ap_rows=ap_rows)
    first_lobe = profile[profile["p"] < 0.1 * N_REF]
    assert np.mean(first_lobe["avg_rank0"]) > 0 > np.mean(first_lobe["avg_rank1"])
