import csv
import logging
import os

from murmur_rank.ap_engine import ap_batch
from murmur_rank.config import DEFAULT_DATASET
from murmur_rank.dataset import filter_conductor, load_curves
from murmur_rank.primes import sieve

# --------------------------------------------------
# --- "THE a_p TABLE" SCRIPT CONFIGURATION ---
# --------------------------------------------------
# Computes a_p at every good prime up to PRIME_LIMIT for each curve in the
# conductor window and appends them to OUTPUT_CSV. Curves already present in
# the file are skipped, so an interrupted run can simply be restarted.
DATASET = DEFAULT_DATASET
CONDUCTOR_WINDOW = (1, 100)  # study window: (40_000, 45_000)
PRIME_LIMIT = 10_000
WORKERS = 4
BATCH_SIZE = 64  # curves per append

OUTPUT_DIR = "output"
OUTPUT_CSV = os.path.join(OUTPUT_DIR, f"ap_table_{PRIME_LIMIT}.csv")

logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s"
)


def build_ap_table():
    records = filter_conductor(load_curves(DATASET), *CONDUCTOR_WINDOW)
    table = sieve(PRIME_LIMIT)

    # Resume: skip curves whose rows are already on disk
    done = set()
    if os.path.exists(OUTPUT_CSV):
        with open(OUTPUT_CSV, "r", newline="") as f:
            done = {row["label"] for row in csv.DictReader(f)}
        logging.info(f"Found {len(done)} curves already processed. Resuming...")
    todo = [r for r in records if r.label not in done]

    os.makedirs(OUTPUT_DIR, exist_ok=True)
    new_file = not os.path.exists(OUTPUT_CSV)
    with open(OUTPUT_CSV, "a", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["label", "conductor", "rank", "p", "ap"])
        if new_file:
            writer.writeheader()

        for start in range(0, len(todo), BATCH_SIZE):
            batch = todo[start : start + BATCH_SIZE]
            rows = ap_batch(batch, table, workers=WORKERS)
            for rec, row in zip(batch, rows):
                writer.writerows(
                    {"label": rec.label, "conductor": rec.conductor, "rank": rec.rank, "p": p, "ap": a}
                    for p, a in zip(row.primes.tolist(), row.ap.tolist())
                )
            f.flush()
            logging.info(f"Processing {start + len(batch)}/{len(todo)} curves...")

    logging.info("=" * 60)
    logging.info(f"a_p table written to: {OUTPUT_CSV}")
    logging.info("=" * 60)


if __name__ == "__main__":
    build_ap_table()
