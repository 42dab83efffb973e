"""Configuration settings and constants."""

from .settings import (
    API_HOST,
    API_PORT,
    APP_NAME,
    APP_VERSION,
    CACHE_SIZE,
    LOG_LEVEL,
    OUTPUT_DIR,
    PROGRESS_LOGGER,
    THREADS,
    configure_logging,
    resolve_threads,
)

__all__ = [
    "API_HOST",
    "API_PORT",
    "APP_NAME",
    "APP_VERSION",
    "CACHE_SIZE",
    "LOG_LEVEL",
    "OUTPUT_DIR",
    "PROGRESS_LOGGER",
    "THREADS",
    "configure_logging",
    "resolve_threads",
]
