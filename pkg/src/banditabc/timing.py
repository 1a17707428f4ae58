"""Wall-clock accumulators for the per-run timing split."""

from __future__ import annotations

import time
from contextlib import contextmanager


class Stopwatch:
    """Accumulates wall-clock time over repeated measured sections.

    Starts at zero; never decreases.
    """

    def __init__(self):
        self._elapsed = 0.0

    @property
    def elapsed(self) -> float:
        return self._elapsed

    @contextmanager
    def measure(self):
        start = time.perf_counter()
        try:
            yield
        finally:
            self._elapsed += time.perf_counter() - start
