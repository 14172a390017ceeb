"""Exception hierarchy shared by every module."""


class ModsigError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ModsigError):
    """Malformed input text. Carries the source name and 1-based line number when known."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ValidationError(ModsigError):
    """Input parsed but violates a structural invariant (self-loop, duplicate edge, ...)."""


class EmptyGraphError(ValidationError):
    """The graph has no edges, so every normalisation by m is undefined."""


class DegenerateError(ModsigError):
    """The color distribution is effectively a single color; the null test is undefined."""


class RangeError(ModsigError):
    """A bound was requested outside the hypotheses under which it holds."""


class BudgetError(ModsigError):
    """A simulation or enumeration exceeds its configured work budget."""
