"""Exception hierarchy shared by every module of the package."""


class BidiError(Exception):
    """Base class for all errors raised by bidisearch."""


# graph construction / parsing
class GraphError(BidiError, ValueError):
    pass


class NonPositiveWeight(GraphError):
    pass


class VertexOutOfRange(GraphError, IndexError):
    pass


class EmptyGraph(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidWalk(GraphError):
    """A claimed path does not chain from s to t over existing edges."""


# oracle
class PolicyMismatch(BidiError, ValueError):
    pass


class NeighborIndexOutOfRange(BidiError, IndexError):
    pass


class TraceMismatch(BidiError):
    """Replaying a recorded trace produced a different answer."""


# search
class InvalidPair(BidiError, ValueError):
    pass


class ModeMismatch(BidiError, ValueError):
    pass


class NoPathRecorded(BidiError):
    pass


class TraceMissing(BidiError):
    pass


# instance lab
class SpecInvalid(BidiError, ValueError):
    pass


class AdviceMismatch(BidiError):
    pass


class GapNonpositive(BidiError, ValueError):
    pass


class OrientationViolated(BidiError, ValueError):
    pass


class SameEdge(BidiError, ValueError):
    pass


class Unreachable(BidiError):
    """Raised where an operation needs t reachable from s."""
