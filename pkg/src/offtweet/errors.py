"""Exception types shared across the toolkit."""


class OfftweetError(Exception):
    """Base class for all toolkit errors."""


class DataError(OfftweetError):
    """Malformed input data: bad TSV rows, labels, dictionary or vector files."""


class NumericError(OfftweetError):
    """Numerical failure inside the neural core (NaN/Inf at a layer boundary)."""
