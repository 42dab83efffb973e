"""Application settings and configuration."""

import logging
import os
import sys

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Application constants
APP_NAME = "los_planner"
APP_VERSION = "0.1.0"

# Worker cap for objective evaluation; the --threads flag wins over this.
THREADS = max(1, int(os.getenv("LOS_PLANNER_THREADS", "1")))

LOG_LEVEL = os.getenv("LOS_PLANNER_LOG_LEVEL", "INFO").upper()
OUTPUT_DIR = os.getenv("LOS_PLANNER_OUTPUT_DIR", "results")

API_HOST = os.getenv("LOS_PLANNER_HOST", "0.0.0.0")
API_PORT = int(os.getenv("LOS_PLANNER_PORT", "8001"))

# Per-UAV coverage grids memoised by the coverage objective
CACHE_SIZE = int(os.getenv("LOS_PLANNER_CACHE_SIZE", "512"))

PROGRESS_LOGGER = "los_planner.progress"


def resolve_threads(flag: int | None) -> int:
    """Thread cap: explicit flag, then environment, then 1."""
    if flag is not None:
        return max(1, int(flag))
    return THREADS


def configure_logging(level: str | None = None) -> None:
    """Configure root logging and the stderr progress channel.

    Called once from the entry points; library modules only create loggers.
    """
    logging.basicConfig(level=level or LOG_LEVEL)
    progress = logging.getLogger(PROGRESS_LOGGER)
    if not progress.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("progress %(message)s"))
        progress.addHandler(handler)
        progress.setLevel(logging.INFO)
        progress.propagate = False
