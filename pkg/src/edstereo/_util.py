"""Small shared helpers: border reflection, worker pools, atomic file writes."""

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

THREADS_ENV = "ED_STEREO_THREADS"


def symmetric_indices(start, stop, size):
    """Indices into an axis of length `size` for positions [start, stop).

    Out-of-range positions are reflected symmetrically about the border,
    border pixel included (position -1 maps to 0, -2 to 1, `size` to
    `size` - 1, ...).  Reflection repeats for positions further than one
    period away, matching ``np.pad(mode="symmetric")``.
    """
    if size <= 0:
        raise ValueError("axis size must be positive")
    pos = np.arange(start, stop)
    m = np.mod(pos, 2 * size)
    return np.where(m >= size, 2 * size - 1 - m, m)


def worker_count():
    """Worker cap from the ED_STEREO_THREADS env var; 0/unset means auto."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
        if n > 0:
            return n
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Map `fn` over `items`, preserving order.

    Uses a thread pool capped by ED_STEREO_THREADS.  Results are returned
    in input order, so output never depends on the worker count.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def atomic_write_bytes(path, data):
    """Write bytes so the target is either fully written or absent."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))
