"""Exception classes shared across the library."""


class LinAttnError(Exception):
    """Base class for all library errors."""


class ShapeError(LinAttnError):
    """Tensor dimensions are inconsistent or empty."""


class ParameterError(LinAttnError):
    """A scalar parameter is outside its admissible range."""


class DataError(LinAttnError):
    """Tensor payload contains NaN or Inf."""


class ResourceError(LinAttnError):
    """A quadratic buffer would exceed the configured byte cap."""


class FormatError(LinAttnError):
    """A tensor file is malformed (bad magic, dtype byte, or truncation)."""


class UsageError(LinAttnError):
    """Caller misused an API or CLI surface (unknown method, bad grid...)."""
