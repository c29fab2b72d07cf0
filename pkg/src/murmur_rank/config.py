import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace

from .errors import InvalidArgumentError
from .nagao import parse_grid_spec

# --------------------------------------------------
# --- RUN CONFIGURATION ---
# --------------------------------------------------
# --- Inputs ---
REPO_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DEFAULT_DATASET = os.path.join(REPO_ROOT, "data", "curves_sample.csv")
DEFAULT_WINDOW = (1, 10**6)  # conductor window [lo, hi]
STUDY_WINDOW = (40_000, 45_000)
PROFILE_WINDOW = (7_500, 10_000)
PROFILE_DATASET = os.path.join(REPO_ROOT, "data", "curves_7500_10000.csv")

# --- a_p and S(B) ---
DEFAULT_PRIME_LIMIT = 50_000
DEFAULT_GRID = "GEOM:3:1.05"
STUDY_B_VALUES = (3_200, 50_000)

# --- Density and maxima ---
DEFAULT_TRUNCATION = 1_000_000
DEFAULT_TOL = 1e-8
TABLE1_N = (10**4, 10**5, 10**6, 10**7, 10**8)
FIGURE3_N = 100_000

# --- Execution ---
DEFAULT_WORKERS = 1
DEFAULT_OUT_DIR = "output"

CONFIG_KEYS = {"dataset", "window", "primes", "grid", "trunc", "tol", "workers", "out"}


def parse_window(text):
    """'LO:HI' -> (lo, hi)."""
    try:
        lo, hi = (int(v) for v in str(text).split(":"))
    except ValueError:
        raise InvalidArgumentError(f"window must look like LO:HI, got {text!r}") from None
    return lo, hi


@dataclass(frozen=True)
class RunConfig:
    dataset: str = DEFAULT_DATASET
    window: tuple = DEFAULT_WINDOW
    prime_limit: int = DEFAULT_PRIME_LIMIT
    grid_spec: str = DEFAULT_GRID
    trunc: int = DEFAULT_TRUNCATION
    tol: float = DEFAULT_TOL
    workers: int = DEFAULT_WORKERS
    out_dir: str = DEFAULT_OUT_DIR
    force: bool = False
    B_values: tuple = field(default=STUDY_B_VALUES)

    def __post_init__(self):
        lo, hi = self.window
        if lo > hi:
            raise InvalidArgumentError(f"window lo={lo} exceeds hi={hi}")
        if self.prime_limit < 2:
            raise InvalidArgumentError(f"prime limit must be >= 2, got {self.prime_limit}")
        if self.workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {self.workers}")
        if self.tol <= 0:
            raise InvalidArgumentError(f"tolerance must be positive, got {self.tol}")
        if self.prime_limit >= 3 and self.grid().max > self.prime_limit:
            raise InvalidArgumentError(
                f"grid reaches B={self.grid().max:g} beyond the prime limit {self.prime_limit}"
            )

    def grid(self):
        return parse_grid_spec(self.grid_spec, self.prime_limit)

    def output_path(self, name):
        return os.path.join(self.out_dir, name)


def load_config_file(path):
    """Read a TOML run file whose keys match the command-line flags."""
    if not os.path.exists(path):
        raise InvalidArgumentError(f"config file not found: {path}")
    with open(path, "rb") as f:
        try:
            data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise InvalidArgumentError(f"{path}: {e}") from None

    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise InvalidArgumentError(f"{path}: unknown keys {sorted(unknown)}")
    logging.debug(f"Loaded run file {path}: {sorted(data)}")
    return data


def _window(value):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidArgumentError(f"window needs two bounds, got {value!r}")
        return int(value[0]), int(value[1])
    return parse_window(value)


def build_config(flags, file_values=None, base=None):
    """Merge settings with precedence flag > file > default.

    `flags` and `file_values` map the flag names in CONFIG_KEYS (plus 'force'
    and 'B_values' for flags) to values; None means "not given".
    """
    merged = {}
    for source in (file_values or {}, flags):
        merged.update({k: v for k, v in source.items() if v is not None})

    changes = {}
    if "dataset" in merged:
        changes["dataset"] = str(merged["dataset"])
    if "window" in merged:
        changes["window"] = _window(merged["window"])
    if "primes" in merged:
        changes["prime_limit"] = int(merged["primes"])
    if "grid" in merged:
        changes["grid_spec"] = str(merged["grid"])
    if "trunc" in merged:
        changes["trunc"] = int(merged["trunc"])
    if "tol" in merged:
        changes["tol"] = float(merged["tol"])
    if "workers" in merged:
        changes["workers"] = int(merged["workers"])
    if "out" in merged:
        changes["out_dir"] = str(merged["out"])
    if merged.get("force"):
        changes["force"] = True
    if "B_values" in merged:
        changes["B_values"] = tuple(float(b) for b in merged["B_values"])

    if base is None:
        return RunConfig(**changes)
    return replace(base, **changes)
