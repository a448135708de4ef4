"""Thread budget shared by the sampler and the service."""
from __future__ import annotations

import os

from .errors import ConfigError

THREADS_ENV = "PROJPOST_THREADS"


def thread_cap(n_tasks: int) -> int:
    """Number of worker threads to use for ``n_tasks`` independent jobs.

    Honors the PROJPOST_THREADS environment variable when set; otherwise
    falls back to the machine's CPU count.
    """
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        limit = os.cpu_count() or 1
    else:
        try:
            limit = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if limit < 1:
            raise ConfigError(f"{THREADS_ENV} must be at least 1, got {limit}")
    return max(1, min(n_tasks, limit))
