"""Hot numeric kernels with an optional numba backend.

Two implementations exist for every kernel: a numba ``@njit`` version and a
vectorised numpy/scipy version.  The active one is chosen once at import time
from the ``MIDAS_SPECD_BACKEND`` environment variable (``numba`` or
``numpy``).  When the variable is unset numba is used if it imports cleanly.
Both versions are always importable under their explicit names so tests and
the benchmark can compare them.
"""
import os

import numpy as np
from scipy.signal import lfilter

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def ar1_filter_numpy(innovations, coef, x0=0.0):
    """Run ``x[i] = coef * x[i-1] + innovations[i]`` starting from ``x[-1] = x0``."""
    innovations = np.asarray(innovations, dtype=np.float64)
    zi = np.array([coef * x0])
    out, _ = lfilter([1.0], [1.0, -coef], innovations, zi=zi)
    return out


def bartlett_long_run_numpy(scores, bandwidth):
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.shape[0]
    out = scores.T @ scores
    for lag in range(1, bandwidth + 1):
        w = 1.0 - lag / (bandwidth + 1.0)
        gamma = scores[lag:].T @ scores[:-lag]
        out += w * (gamma + gamma.T)
    return out / n


if HAS_NUMBA:

    @njit(cache=True)
    def _ar1_loop(innovations, coef, x0):
        n = innovations.shape[0]
        out = np.empty(n)
        prev = x0
        for i in range(n):
            prev = coef * prev + innovations[i]
            out[i] = prev
        return out

    @njit(cache=True)
    def _bartlett_loop(scores, bandwidth):
        n, k = scores.shape
        out = np.zeros((k, k))
        for lag in range(bandwidth + 1):
            w = 1.0 if lag == 0 else 1.0 - lag / (bandwidth + 1.0)
            for a in range(k):
                for b in range(k):
                    acc = 0.0
                    for t in range(lag, n):
                        acc += scores[t, a] * scores[t - lag, b]
                    if lag == 0:
                        out[a, b] += acc
                    else:
                        out[a, b] += w * acc
                        out[b, a] += w * acc
        return out / n

    def ar1_filter_numba(innovations, coef, x0=0.0):
        """Numba version of :func:`ar1_filter_numpy`."""
        return _ar1_loop(np.ascontiguousarray(innovations, dtype=np.float64),
                         float(coef), float(x0))

    def bartlett_long_run_numba(scores, bandwidth):
        return _bartlett_loop(np.ascontiguousarray(scores, dtype=np.float64),
                              int(bandwidth))

else:  # pragma: no cover
    ar1_filter_numba = ar1_filter_numpy
    bartlett_long_run_numba = bartlett_long_run_numpy


def _select_backend():
    requested = os.environ.get("MIDAS_SPECD_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(f"MIDAS_SPECD_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numpy" or not HAS_NUMBA:
        return "numpy"
    return "numba"


BACKEND = _select_backend()

if BACKEND == "numba":
    ar1_filter = ar1_filter_numba
    bartlett_long_run = bartlett_long_run_numba
else:
    ar1_filter = ar1_filter_numpy
    bartlett_long_run = bartlett_long_run_numpy
