"""Exception hierarchy shared by every glueform module."""


class GlueformError(Exception):
    """Base class for all errors raised by glueform."""


class UsageError(GlueformError, ValueError):
    """An operation was called with arguments violating its preconditions
    (mismatched contexts, arities, degrees or indices)."""


class ParseError(UsageError):
    """Malformed textual input.

    ``pos`` is the 0-based column inside the offending text and ``line``
    the 1-based line number when the text came from a file.
    """

    def __init__(self, message, pos=None, line=None):
        self.message = message
        self.pos = pos
        self.line = line
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.pos is not None:
            where.append(f"column {self.pos + 1}")
        if where:
            return f"{', '.join(where)}: {self.message}"
        return self.message


class VerificationError(GlueformError):
    """A presentation failed a symbolic verification it is required to pass."""


class InternalConsistencyError(GlueformError, AssertionError):
    """An identity that holds by construction was violated; this is an engine bug."""
