"""Small shared helpers: deterministic parallel mapping and diffable output."""

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor

# Chunk size is fixed so that the set of numpy calls (shapes, order of writes into the
# result list) never depends on the worker count; workers only change who runs a chunk.
CHUNK = 16


def resolve_workers(workers):
    """Map a workers spec (int >= 1 or 'auto'/None) to a concrete thread count."""
    if workers in (None, "auto"):
        return min(8, os.cpu_count() or 1)
    w = int(workers)
    if w < 1:
        raise ValueError("workers must be >= 1 or 'auto'")
    return w


def parallel_map(fn, items, workers=1):
    """Apply fn to each item, possibly on a thread pool.

    Results come back in input order regardless of scheduling; each item's work must be
    independent (no shared mutable state) for the determinism contract to hold.
    """
    items = list(items)
    w = resolve_workers(workers)
    if w == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    out = [None] * len(items)

    def run(idx):
        out[idx] = fn(items[idx])

    with ThreadPoolExecutor(max_workers=w) as pool:
        list(pool.map(run, range(len(items)), chunksize=CHUNK))
    return out


def chunked(seq, size=CHUNK):
    seq = list(seq)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def fmt17(x) -> str:
    """Round-trip decimal formatting (17 significant digits) for diffable CSV."""
    return format(float(x), ".17g")


def atomic_write_text(path: str, text: str) -> None:
    """Write via temp file + rename so readers never observe a partial file."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", text=True)
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
