"""Exception hierarchy shared by all stclab modules."""


class StcLabError(Exception):
    """Base class for every error raised by stclab."""


class InvalidArgument(StcLabError, ValueError):
    pass


class InvalidTree(StcLabError, ValueError):
    pass


class InvalidGraph(StcLabError, ValueError):
    pass


class Unsupported(StcLabError, ValueError):
    pass


class PreconditionViolated(StcLabError, ValueError):
    pass


class Refused(StcLabError, RuntimeError):
    """Raised when an input is too large for an exhaustive routine."""


class ParseError(StcLabError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
