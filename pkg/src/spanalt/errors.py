"""Exception types shared across the package."""


class SpanaltError(Exception):
    """Base class for all errors raised by spanalt."""


class ValidationError(SpanaltError, ValueError):
    """An input object violates a structural invariant."""


class ResourceError(SpanaltError, RuntimeError):
    """A configurable enumeration cap was exceeded.

    The ``cap`` attribute carries the limit that was hit so callers can
    report it or retry with a larger value.
    """

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeded the cap of {cap}")
        self.what = what
        self.cap = cap


class FormatError(SpanaltError, ValueError):
    """A data file could not be parsed."""

    def __init__(self, message: str, path: str | None = None,
                 line: int | None = None, column: int | None = None):
        where = path or "<input>"
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.column = column
