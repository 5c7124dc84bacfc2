"""Aggregation weight vectors and the mixed-frequency sample container.

High-frequency rows are stored most-recent-first: column 0 of ``x_high`` holds
``x_t``, column 1 holds ``x_{t-1/m}`` and so on.  Every weight vector in this
module is indexed the same way.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInstruments, DimensionMismatch, InvalidParameter

SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightVector:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise InvalidParameter("weights must be a non-empty vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidParameter("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > SUM_TOL * max(1, w.size):
            raise InvalidParameter(f"weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def m(self):
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)


@dataclass(frozen=True)
class MixedSample:
    """Low-frequency response ``y`` and the T x m high-frequency regressor block."""

    y: np.ndarray
    x_high: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        x = np.asarray(self.x_high, dtype=np.float64)
        if y.ndim != 1 or x.ndim != 2:
            raise DimensionMismatch("y must be 1-D and x_high 2-D")
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"x_high has {x.shape[0]} rows but y has {y.shape[0]} entries")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x_high", x)

    @property
    def T(self):
        return self.y.shape[0]

    @property
    def m(self):
        return self.x_high.shape[1]


def _check_m(m):
    if int(m) != m or m < 1:
        raise InvalidParameter(f"frequency ratio must be a positive integer, got {m!r}")
    return int(m)


def _normalise(raw):
    return WeightVector(raw / raw.sum())


def flat_weights(m):
    m = _check_m(m)
    return WeightVector(np.full(m, 1.0 / m))


def end_of_period_weights(m, leading_values):
    """Put ``leading_values`` on the n most recent lags and zero on the rest."""
    m = _check_m(m)
    lead = np.atleast_1d(np.asarray(leading_values, dtype=np.float64))
    n = lead.size
    if not 1 <= n < m:
        raise InvalidParameter(f"need 1 <= n < m, got n={n}, m={m}")
    if np.any(lead <= 0):
        raise InvalidParameter("leading values must be strictly positive")
    if abs(lead.sum() - 1.0) > 1e-10:
        raise InvalidParameter(f"leading values sum to {lead.sum()!r}, not 1")
    w = np.zeros(m)
    w[:n] = lead
    return WeightVector(w)


def midas_weights(theta, m):
    """MIDAS alternative weights, element j proportional to ``(2 - j/m)**(4 theta)``."""
    m = _check_m(m)
    if not np.isfinite(theta):
        raise InvalidParameter("theta must be finite")
    j = np.arange(1, m + 1)
    return _normalise((2.0 - j / m) ** (4.0 * theta))


def instrument_weights(m):
    """The two decreasing instrument weight sequences (geometric and linear)."""
    m = _check_m(m)
    j = np.arange(1, m + 1)
    geometric = _normalise(0.9 ** (j - 1.0))
    linear = _normalise((m + 1.0 - j))
    return geometric, linear


def aggregate(sample, w):
    weights = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)
    if weights.shape[0] != sample.m:
        raise DimensionMismatch(f"weights have m={weights.shape[0]}, sample has m={sample.m}")
    return sample.x_high @ weights


def build_instruments(sample):
    """T x 2 matrix of instruments aggregated with the two decreasing weights."""
    if sample.m < 2:
        raise DegenerateInstruments("instruments coincide when m = 1")
    u1, u2 = instrument_weights(sample.m)
    return sample.x_high @ np.column_stack([u1.weights, u2.weights])


def parse_null(spec, m):
    """Parse the CLI null syntax: ``flat`` or ``eop:w1,w2,...``."""
    text = spec.strip().lower()
    if text == "flat":
        return flat_weights(m)
    if text.startswith("eop:"):
        try:
            values = [float(v) for v in text[4:].split(",") if v.strip()]
        except ValueError as exc:
            raise InvalidParameter(f"bad end-of-period weights {spec!r}") from exc
        return end_of_period_weights(m, values)
    raise InvalidParameter(f"null must be 'flat' or 'eop:w1,...', got {spec!r}")
