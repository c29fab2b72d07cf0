"""Full-scale checks on the conductor window [40000, 45000].

Needs a labelled extract of every curve in the window; point MURMUR_RANK_DATASET
at it. Runs for a long time.
"""

import os

import pytest

from murmur_rank.ap_engine import ap_batch
from murmur_rank.classifier import accuracy_by_B
from murmur_rank.config import STUDY_WINDOW
from murmur_rank.dataset import filter_conductor, load_curves
from murmur_rank.fx import empirical_maxima
from murmur_rank.nagao import family_average, geometric_grid, sb_traces
from murmur_rank.primes import sieve

DATASET = os.environ.get("MURMUR_RANK_DATASET")
WORKERS = int(os.environ.get("MURMUR_RANK_WORKERS", "4"))

pytestmark = pytest.mark.skipif(not DATASET, reason="MURMUR_RANK_DATASET not set")


@pytest.fixture(scope="module")
def window_run():
    records = filter_conductor(load_curves(DATASET), *STUDY_WINDOW)
    table = sieve(100_000)
    ap_rows = ap_batch(records, table, workers=WORKERS)
    grid = geometric_grid(100_000.0, ratio=1.02)
    traces = sb_traces(records, grid, table, ap_rows=ap_rows)
    return records, traces, ap_rows


def test_classifier_accuracy(window_run):
    records, traces, ap_rows = window_run
    small, large = accuracy_by_B(traces, records, (3_200, 50_000), ap_rows=ap_rows)
    assert small.accuracy >= 0.985
    assert small.cutoff == pytest.approx(0.137, abs=0.005)
    assert large.accuracy == pytest.approx(0.9785, abs=0.003)
    assert large.cutoff == pytest.approx(0.069, abs=0.005)


def test_murmuration_peaks(window_run):
    records, traces, _ = window_run
    families = family_average(traces, [r.rank for r in records])
    peaks = empirical_maxima(families, STUDY_WINDOW[0], window=9)
    assert any(abs(x - 0.08) <= 0.03 for x in peaks)
    assert any(abs(x - 0.65) <= 0.10 for x in peaks)
