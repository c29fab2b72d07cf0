import logging
from multiprocessing import Pool

# --------------------------------------------------
# --- POOL CONFIGURATION ---
# --------------------------------------------------
NUM_WORKERS = 4  # Adjust based on your CPU cores
CHUNKSIZE = 1  # Tasks are already coarse (chunks of curves)
PROGRESS_EVERY = 10


def init_worker(log_level):
    """Give each worker process the parent's log level."""
    logging.basicConfig(
        level=log_level, format="%(asctime)s - %(levelname)s - %(message)s"
    )


def run_parallel(task, items, workers=NUM_WORKERS, label="tasks"):
    """Apply `task` to every item and return the results in input order.

    `task` must be a module-level function so it can be pickled. Results are
    collected with an ordered `imap`, so the output does not depend on how the
    pool schedules the work or on the number of workers.
    """
    items = list(items)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    results = []
    if workers == 1 or len(items) <= 1:
        for i, item in enumerate(items, 1):
            results.append(task(item))
            if i % PROGRESS_EVERY == 0:
                logging.info(f"[{label}] Progress: {i}/{len(items)}")
        return results

    logging.info(f"--- Starting Parallel Run: {label} with {workers} workers ---")
    log_level = logging.getLogger().getEffectiveLevel()
    with Pool(processes=workers, initializer=init_worker, initargs=(log_level,)) as pool:
        for i, result in enumerate(pool.imap(task, items, chunksize=CHUNKSIZE), 1):
            results.append(result)
            if i % PROGRESS_EVERY == 0:
                logging.info(f"[{label}] Progress: {i}/{len(items)}")

    logging.info(f"[{label}] Run Complete. {len(results)} results.")
    return results
