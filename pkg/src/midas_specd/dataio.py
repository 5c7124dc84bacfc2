"""Reading and writing mixed-frequency samples as a pair of CSV files.

Low-frequency file: header ``period_id,y``, one row per period.
High-frequency file: header ``period_id,lag_index,x`` with ``lag_index`` in
``0..m-1`` where lag 0 is the most recent observation of the period.

Both files are UTF-8 with a header row and ``.`` as decimal separator.
Floats are written with ``repr`` so a save/load round trip is exact.
"""
import csv
import math
from pathlib import Path

import numpy as np

from .exceptions import InvalidParameter, MissingValue, ParseError, RaggedPeriod
from .weights import MixedSample

LOW_COLUMNS = ("period_id", "y")
HIGH_COLUMNS = ("period_id", "lag_index", "x")
_MISSING = {"", "na", "nan", "null", "none"}


def _period_key(pid):
    # numeric ids sort numerically, anything else lexically after them
    try:
        return (0, int(pid), "")
    except ValueError:
        return (1, 0, pid)


def _read_rows(path, columns):
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(path, 0, f"cannot open file: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "file is empty; a header row is required") from None
        header = [h.strip().lstrip("﻿") for h in header]
        missing = [c for c in columns if c not in header]
        if missing:
            raise ParseError(path, 1, f"header lacks column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in columns]
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(path, line, f"expected {len(header)} fields, found {len(row)}")
            yield line, [row[i].strip() for i in idx]


def _value(path, line, text, column):
    if text.lower() in _MISSING:
        raise MissingValue(f"{path}:{line}: missing value in column {column!r}")
    try:
        v = float(text)
    except ValueError:
        raise ParseError(path, line, f"column {column!r}: cannot parse {text!r} as a number") from None
    if math.isnan(v):
        raise MissingValue(f"{path}:{line}: missing value in column {column!r}")
    if math.isinf(v):
        raise ParseError(path, line, f"column {column!r}: infinite value")
    return v


def load_sample(low_path, high_path, m=None):
    """Load a :class:`MixedSample` from the low- and high-frequency CSV files.

    Parameters
    ----------
    low_path, high_path : path-like
    m : int, optional
        Frequency ratio.  Inferred from the first period when omitted.

    Raises
    ------
    ParseError
        Malformed file, with the offending line number.
    RaggedPeriod
        A period does not have exactly ``m`` distinct lags ``0..m-1``.
    MissingValue
        An empty or NaN value.
    """
    y_by_period = {}
    for line, (pid, y) in _read_rows(low_path, LOW_COLUMNS):
        if not pid:
            raise MissingValue(f"{low_path}:{line}: missing period_id")
        if pid in y_by_period:
            raise ParseError(low_path, line, f"duplicate period_id {pid!r}")
        y_by_period[pid] = _value(low_path, line, y, "y")

    x_by_period = {}
    for line, (pid, lag, x) in _read_rows(high_path, HIGH_COLUMNS):
        if not pid:
            raise MissingValue(f"{high_path}:{line}: missing period_id")
        if not lag:
            raise MissingValue(f"{high_path}:{line}: missing lag_index")
        try:
            lag_i = int(lag)
        except ValueError:
            raise ParseError(high_path, line, f"lag_index {lag!r} is not an integer") from None
        if lag_i < 0:
            raise ParseError(high_path, line, f"lag_index {lag_i} is negative")
        lags = x_by_period.setdefault(pid, {})
        if lag_i in lags:
            raise ParseError(high_path, line, f"duplicate lag_index {lag_i} in period {pid!r}")
        lags[lag_i] = _value(high_path, line, x, "x")

    if not y_by_period:
        raise ParseError(low_path, 2, "no data rows")
    periods = sorted(y_by_period, key=_period_key)
    if m is None:
        m = len(x_by_period.get(periods[0], {}))
        if m == 0:
            raise RaggedPeriod(periods[0], 0, "at least 1")
    elif m < 1:
        raise InvalidParameter("m must be positive")

    extra = set(x_by_period) - set(y_by_period)
    if extra:
        pid = sorted(extra, key=_period_key)[0]
        raise ParseError(high_path, 0, f"period {pid!r} has no low-frequency observation")

    x_high = np.empty((len(periods), m))
    for t, pid in enumerate(periods):
        lags = x_by_period.get(pid, {})
        if len(lags) != m or set(lags) != set(range(m)):
            raise RaggedPeriod(pid, len(lags), m)
        x_high[t] = [lags[j] for j in range(m)]
    y = np.array([y_by_period[p] for p in periods])
    return MixedSample(y, x_high)


def save_sample(sample, low_path, high_path, period_ids=None):
    """Write ``sample`` in the layout read by :func:`load_sample`."""
    ids = list(range(1, sample.T + 1)) if period_ids is None else list(period_ids)
    if len(ids) != sample.T:
        raise InvalidParameter("need one period id per low-frequency observation")
    with open(low_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LOW_COLUMNS)
        for pid, y in zip(ids, sample.y):
            w.writerow([pid, repr(float(y))])
    with open(high_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HIGH_COLUMNS)
        for pid, row in zip(ids, sample.x_high):
            for j, x in enumerate(row):
                w.writerow([pid, j, repr(float(x))])
