import logging
import os

import requests

from murmur_rank.config import PROFILE_DATASET, PROFILE_WINDOW, REPO_ROOT
from murmur_rank.dataset import filter_conductor, parse_allcurves, serialize_curves, split_by_rank

# --------------------------------------------------
# --- "THE EXTRACT" SCRIPT CONFIGURATION ---
# --------------------------------------------------
# Builds the labelled curve CSV for one conductor window from Cremona's
# allcurves tables (rank 0 and 1 only). Tables already in CACHE_DIR are not
# downloaded again, so they can also be dropped there by hand.
CONDUCTOR_WINDOW = PROFILE_WINDOW
FIRST_IN_CLASS = True  # one curve per isogeny class; a_p is an isogeny invariant
ALLCURVES_URL = "https://raw.githubusercontent.com/JohnCremona/ecdata/master/allcurves/{name}"
TABLE_SPAN = 10_000  # conductors per allcurves file
CACHE_DIR = os.path.join(REPO_ROOT, "data", "raw")
OUTPUT_CSV = PROFILE_DATASET
OVERWRITE = False

logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s"
)


def table_names(lo, hi):
    """allcurves file names covering conductors lo..hi."""
    first, last = lo // TABLE_SPAN, hi // TABLE_SPAN
    return [
        f"allcurves.{k * TABLE_SPAN:05d}-{(k + 1) * TABLE_SPAN - 1:05d}"
        for k in range(first, last + 1)
    ]


def download_table(name, destination):
    """Downloads one allcurves table unless it is already cached."""
    if os.path.exists(destination):
        logging.info(f"Using cached {destination}")
        return True
    url = ALLCURVES_URL.format(name=name)
    try:
        logging.info(f"Downloading {url} to {destination}...")
        response = requests.get(url, timeout=120)
        response.raise_for_status()
        with open(destination, "wb") as f:
            f.write(response.content)
        logging.info("Download complete.")
        return True
    except requests.RequestException as e:
        logging.error("Failed to download table. Check the URL or place the file in the cache.")
        logging.error(f"Error: {e}")
        return False


def build_extract():
    lo, hi = CONDUCTOR_WINDOW
    if os.path.exists(OUTPUT_CSV) and not OVERWRITE:
        logging.info(f"{OUTPUT_CSV} exists; set OVERWRITE = True to rebuild it.")
        return

    os.makedirs(CACHE_DIR, exist_ok=True)
    records = []
    for name in table_names(lo, hi):
        path = os.path.join(CACHE_DIR, name)
        if not download_table(name, path):
            return
        with open(path, "r", encoding="utf-8") as f:
            table = parse_allcurves(f.read(), first_in_class=FIRST_IN_CLASS)
        records.extend(filter_conductor(table, lo, hi))

    groups = split_by_rank(records)
    header = (
        f"# Cremona allcurves, conductors {lo}..{hi}, ranks 0 and 1"
        f"{', first curve per isogeny class' if FIRST_IN_CLASS else ''}.\n"
    )
    os.makedirs(os.path.dirname(OUTPUT_CSV), exist_ok=True)
    with open(OUTPUT_CSV, "w", encoding="utf-8", newline="") as f:
        f.write(header + serialize_curves(records))

    logging.info("=" * 60)
    logging.info(f"Extract written to: {OUTPUT_CSV}")
    logging.info(f"Rank 0: {len(groups[0])} curves, rank 1: {len(groups[1])} curves")
    logging.info("=" * 60)


if __name__ == "__main__":
    build_extract()
