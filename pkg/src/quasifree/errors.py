"""Exception hierarchy shared by every module of the engine."""


class QuasiFreeError(Exception):
    """Base class; the CLI maps every subclass to exit status 3."""


class DimensionError(QuasiFreeError):
    pass


class NotAComplexError(QuasiFreeError):
    pass


class FlavorError(QuasiFreeError):
    pass


class DegreeError(QuasiFreeError):
    pass


class ShiftError(QuasiFreeError):
    pass


class CutoffError(QuasiFreeError):
    pass


class NotClosedError(QuasiFreeError):
    pass


class ConnectivityError(QuasiFreeError):
    pass


class ChainMapError(QuasiFreeError):
    """An assignment does not commute with the differentials."""


class MalformedHomotopyError(QuasiFreeError):
    pass


class PreconditionError(QuasiFreeError):
    pass


class HypothesisError(QuasiFreeError):
    """Homology concentration (or another standing hypothesis) cannot be verified."""


class NilpotenceError(QuasiFreeError):
    pass


class SparsenessError(QuasiFreeError):
    pass


class ObstructionError(QuasiFreeError):
    """A cocycle that had to be a boundary is not one.

    ``cocycle`` holds the offending element and ``generator`` the generator
    whose extension failed.
    """

    def __init__(self, message, cocycle=None, generator=None):
        super().__init__(message)
        self.cocycle = cocycle
        self.generator = generator


class ParseError(QuasiFreeError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
