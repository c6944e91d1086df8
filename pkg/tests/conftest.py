import os

# Must happen before numba's first import anywhere in the suite: the worker
# determinism tests exercise up to 8 render workers regardless of host size.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(os.cpu_count() or 1, 8)))
