"""Exception types shared by the parsers, validators and the command line."""


class ParseError(ValueError):
    """A text file could not be parsed.  ``lineno`` is 1-based, or None."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InvariantError(ValueError):
    """A structural invariant of a complex, profile or barcode is violated."""


class PipelineError(RuntimeError):
    """A member of an entropy family failed; ``member`` names it."""

    def __init__(self, member, message):
        self.member = member
        super().__init__(f"member {member!r}: {message}")
