import logging
import os

from murmur_rank.ap_engine import ap_batch
from murmur_rank.classifier import accuracy_by_B, reports_frame, text_histogram
from murmur_rank.config import DEFAULT_DATASET
from murmur_rank.dataset import filter_conductor, load_curves
from murmur_rank.nagao import BGrid, score_table, sb_traces
from murmur_rank.primes import sieve
from murmur_rank.reports import write_csv

# --------------------------------------------------
# --- "THE CLASSIFIER" SCRIPT CONFIGURATION ---
# --------------------------------------------------
# Optimal cutoff C on S(B) separating rank 0 (S > C) from rank 1, for each B.
# The study window compares the first crest (B = 0.08 * 40_000 = 3_200) with
# B = 50_000.
DATASET = DEFAULT_DATASET
CONDUCTOR_WINDOW = (1, 100)
B_VALUES = [8, 50, 200, 1_000, 5_000]  # study run: [3_200, 50_000]
WORKERS = 4
OVERWRITE = True

OUTPUT_CSV = os.path.join("output", "classify.csv")

logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s"
)


def run_classifier():
    records = filter_conductor(load_curves(DATASET), *CONDUCTOR_WINDOW)
    table = sieve(int(max(B_VALUES)))
    grid = BGrid(sorted(float(b) for b in B_VALUES))
    ap_rows = ap_batch(records, table, workers=WORKERS)
    traces = sb_traces(records, grid, table, ap_rows=ap_rows)

    reports = accuracy_by_B(traces, records, B_VALUES)
    for report in reports:
        print(report.format_table())
        scores = score_table(traces, records, report.B)
        for rank in (0, 1):
            values = scores.loc[scores["rank"] == rank, "S"].tolist()
            print(text_histogram(values, f"S({report.B:g}) rank {rank}"))

    best = max(reports, key=lambda r: r.accuracy)
    logging.info("-" * 60)
    logging.info(f"Best B = {best.B:g}: C = {best.cutoff:.4f}, accuracy {best.accuracy:.2%}")
    logging.info("-" * 60)
    write_csv(reports_frame(reports), OUTPUT_CSV, OVERWRITE)


if __name__ == "__main__":
    run_classifier()
