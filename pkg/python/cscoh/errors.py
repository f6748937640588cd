"""
cscoh error types
Every failure the engine reports is one of these; the CLI maps them to exit codes.
"""

from typing import Optional


class CscohError(Exception):
    """Base class for all engine errors"""

    exit_code = 1


class SpecError(CscohError, ValueError):
    """A spec document, form or scalar literal could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None, token: Optional[str] = None):
        self.line = line
        self.token = token
        location = ""
        if line is not None:
            location += f"line {line}: "
        if token is not None:
            message = f"{message} (at {token!r})"
        super().__init__(f"{location}{message}")


class ValidationError(CscohError, ValueError):
    """A structural identity of the input complex does not hold"""

    def __init__(self, identity: str, witness: Optional[str] = None, detail: str = ""):
        self.identity = identity
        self.witness = witness
        message = f"{identity} fails"
        if witness:
            message += f" on {witness}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class PreconditionError(CscohError, ValueError):
    """An analysis was asked for on inputs that do not meet its preconditions"""


class StarUnavailable(CscohError):
    """The symplectic star needs conjugation data the instance does not carry"""

    def __init__(self, name: str = ""):
        suffix = f" for {name}" if name else ""
        super().__init__(f"star unavailable{suffix} — skipping *_s cross-checks")


class ConsistencyError(CscohError, RuntimeError):
    """Two computations that must agree did not; always an engine bug"""

    exit_code = 2

    def __init__(self, message: str, dump: Optional[dict] = None):
        self.dump = dump or {}
        super().__init__(message)
