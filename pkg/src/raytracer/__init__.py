"""CPU-parallel Whitted-style ray tracer with soft shadows, reflections and a
frame-streaming server."""

import os

# The pixel kernel partitions work across numba threads. Raise the pool size
# before numba's first import so small hosts can still run 8-worker
# determinism checks; NUMBA_NUM_THREADS set by the user wins.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(os.cpu_count() or 1, 8)))

__version__ = "0.1.0"
