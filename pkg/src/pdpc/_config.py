"""Process-wide worker count used by every parallel loop."""

from __future__ import annotations

import contextlib
import os

_threads = 0


def hardware_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def set_num_threads(n: int) -> None:
    """Set the worker-pool size; ``0`` means hardware parallelism."""
    global _threads
    if n < 0:
        raise ValueError(f"thread count must be >= 0, got {n}")
    _threads = int(n)


def get_num_threads() -> int:
    return _threads if _threads > 0 else hardware_threads()


@contextlib.contextmanager
def num_threads(n: int):
    global _threads
    saved = _threads
    set_num_threads(n)
    try:
        yield
    finally:
        _threads = saved
