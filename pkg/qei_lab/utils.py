"""
Utility functions for logging, provenance hashing and ordered parallel maps.
"""
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
from loguru import logger

from qei_lab.config import settings

T = TypeVar("T")
R = TypeVar("R")


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    # Remove default logger
    logger.remove()

    level = level or settings.log_level

    # Console handler with colors
    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
        level=level,
        colorize=True,
    )

    # File handler with rotation
    log_file = log_file if log_file is not None else settings.log_file
    if log_file:
        logger.add(
            log_file,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}",
            level=level,
            rotation="10 MB",
            retention="30 days",
            compression="zip",
        )

    logger.debug("Logging configured")


def provenance_digest(provenance: dict) -> str:
    """Short stable hash identifying an experiment configuration."""
    content = json.dumps(provenance, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(content).hexdigest()[:16]


def run_ordered(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Apply func to independent items concurrently.

    Results come back in input order regardless of completion order.
    """
    items = list(items)
    workers = min(threads or settings.threads, max(len(items), 1))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def row_blocks(n: int, parts: int) -> List[slice]:
    """Split range(n) into at most `parts` contiguous slices."""
    bounds = np.linspace(0, n, min(parts, n) + 1).astype(int)
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def is_cauchy(values: Sequence[float], tolerance: float) -> bool:
    """True when the last successive difference is below tolerance and differences shrink."""
    if len(values) < 2:
        return True
    diffs = np.abs(np.diff(np.asarray(values, dtype=float)))
    return bool(diffs[-1] < tolerance and np.all(diffs[1:] <= diffs[:-1] + tolerance))


def is_diverging(values: Sequence[float]) -> bool:
    """
    Downward divergence as a trend: strictly decreasing values whose last
    step is larger than the first. Never a proof of unboundedness.
    """
    if len(values) < 3:
        return False
    diffs = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(diffs < 0) and abs(diffs[-1]) > abs(diffs[0]))
