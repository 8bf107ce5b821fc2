import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

# --- PROJECT STRUCTURE ---
BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / ".env")

# --- LOGGING ---
LOG_ENV_VAR = "CASCADE_LOG"
LOG_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "quiet": logging.WARNING,
}
LOG_FORMAT = "%(asctime)s [%(name)s] %(levelname)s: %(message)s"

# --- LINEAR MODELS ---
DEFAULT_SIGMA = 1.0
DEFAULT_THETA_NORM = 1.0
SYMMETRY_TOL = 1e-10

# --- TRUNCATED SVD ---
SVD_OVERSAMPLES = 4
SVD_MAX_ITER = 50
SVD_TOL = 1e-9

# --- SYNTHETIC PROBLEMS ---
WBAR_LOW = 0.05
WBAR_HIGH = 0.95
SYNTHETIC_MAX_RESAMPLES = 100

# --- EXPERIMENTS ---
CHECKPOINT_COUNT = 1000
DEFAULT_WORKERS = 1

# --- EXPORT ---
CSV_FLOAT_FORMAT = "%.12g"
FEATURE_FLOAT_FORMAT = "%.15g"
TRACE_FILE = "trace.csv"
RUNS_FILE = "runs.csv"


def log_level():
    value = os.environ.get(LOG_ENV_VAR, "info").strip().lower()
    return LOG_LEVELS.get(value)


def configure_logging():
    """Route log records to stderr at the level named by CASCADE_LOG."""
    level = log_level()
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level if level is not None else logging.INFO)
    if level is None:
        logging.getLogger(__name__).warning(
            f"Unknown {LOG_ENV_VAR} value {os.environ.get(LOG_ENV_VAR)!r}, using 'info'"
        )


def progress_enabled():
    return (log_level() or logging.INFO) <= logging.INFO
