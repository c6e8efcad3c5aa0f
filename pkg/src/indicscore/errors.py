"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad configuration: unknown language, malformed policy, bad thresholds."""


class DataError(ValueError):
    """Malformed input data (files, rows, spans).

    ``details`` carries one message per offending line/row when the error
    aggregates several problems from a single file.
    """

    def __init__(self, message: str, details: list[str] | None = None):
        self.details = details or []
        if self.details:
            message = message + "\n" + "\n".join("  " + d for d in self.details)
        super().__init__(message)


class ReferenceDataError(DataError):
    """A reference entity token is unusable for its declared matcher class."""
