"""Exception hierarchy shared across the toolkit.

The CLI maps these onto its exit-code table, so raise the most specific
class that applies.
"""


class ChromadaptError(Exception):
    """Base class for all toolkit errors."""


class DomainError(ChromadaptError):
    """A value is outside its documented domain (bad channel, bad schema)."""


class ParameterError(ChromadaptError):
    """Operation parameters are structurally invalid or impossible."""


class GenerationError(ChromadaptError):
    """A procedural search exhausted its budget without a valid result."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class SequencingError(ChromadaptError):
    """A response arrived for the wrong plate."""


class StateError(ChromadaptError):
    """An operation was applied to a session in the wrong state."""


class ValidationError(ChromadaptError):
    """Input data is well-formed but inconsistent with its contract."""


class ReplayError(ChromadaptError):
    """The persisted event log could not be replayed."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"{message} (state file line {line_number})"
        super().__init__(message)
        self.line_number = line_number
