"""Exception hierarchy shared by every module in the package."""


class MidasSpecError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(MidasSpecError, ValueError):
    pass


class RankDeficient(MidasSpecError, ValueError):
    """A design matrix (or moment matrix) is singular beyond tolerance."""


class InvalidParameter(MidasSpecError, ValueError):
    pass


class DegenerateInstruments(MidasSpecError, ValueError):
    """The instrument set cannot identify the 2SLS estimator (m = 1 or collinear columns)."""


class BandwidthTooLarge(MidasSpecError, ValueError):
    pass


class DegenerateNull(MidasSpecError, ValueError):
    """The null aggregate has zero population variance."""


class DataError(MidasSpecError):
    """Base class for problems with user-supplied data files."""


class ParseError(DataError):
    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class RaggedPeriod(DataError):
    def __init__(self, period, count, m):
        self.period = period
        self.count = count
        self.m = m
        super().__init__(f"period {period!r} has {count} high-frequency rows, expected {m}")


class MissingValue(DataError):
    pass
