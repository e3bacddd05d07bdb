"""
Exception hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI should return for it.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class DecayGraphError(Exception):
    """Base class for all decaygraph errors."""

    exit_code = EXIT_INTERNAL

    def __init__(self, message, *, hint=None):
        super().__init__(message)
        self.message = message
        self.hint = hint

    def to_dict(self):
        payload = {"error": type(self).__name__, "message": self.message}
        if self.hint:
            payload["hint"] = self.hint
        return payload


class UsageError(DecayGraphError):
    """Invalid flags or configuration values."""

    exit_code = EXIT_USAGE


class DataError(DecayGraphError, ValueError):
    """Input data is invalid, inconsistent or unreadable."""

    exit_code = EXIT_DATA


class MalformedRowError(DataError):
    """A call-record row could not be parsed (raised in strict mode)."""

    def __init__(self, row_number, reason, *, line=None):
        message = f"Malformed record at row {row_number}: {reason}"
        super().__init__(message, hint="Fix the row or rerun without --strict to skip it.")
        self.row_number = row_number
        self.reason = reason
        self.line = line


class SynthError(DataError):
    """Infeasible generator configuration or a corpus this generator did not produce."""


class StageError(DecayGraphError):
    """A pipeline stage failed; wraps the underlying cause."""

    def __init__(self, stage, cause):
        super().__init__(f"Stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", EXIT_INTERNAL)
