"""Exception hierarchy for tensor-ustat.

Every error carries the process exit code the CLI should use when it escapes a command.
"""


class UStatError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


class DataParseError(UStatError, ValueError):
    """Input file could not be parsed."""

    exit_code = 2


class SelfLoopError(UStatError, ValueError):
    """Edge list contains an edge from a vertex to itself."""

    exit_code = 5


class MemoryCapExceeded(UStatError, MemoryError):
    """A tensor or intermediate would exceed the configured entry cap."""

    exit_code = 3


class SampleTooSmall(UStatError, ValueError):
    """Fewer observations than the statistic's order requires."""

    exit_code = 4


# tensor-core
class InvalidOutput(UStatError, ValueError):
    """Output tuple has duplicates or names an index no input uses."""


class InvalidSignature(UStatError, ValueError):
    """Signature is empty, contains an empty tuple, or does not cover [m]."""


class ShapeMismatch(UStatError, ValueError):
    """Tensor orders or extents disagree with the notation."""


class IndexAbsent(UStatError, ValueError):
    """A tuple handed to an elimination step does not contain the index."""


class TooLargeForExhaustive(UStatError, ValueError):
    """Exhaustive order search requested on too many indices."""


# partitions
class OrderTooLarge(UStatError, ValueError):
    """Partition enumeration requested beyond the configured ceiling."""


class NotRefinement(UStatError, ValueError):
    """Möbius pair requested for partitions that are not ordered by refinement."""


class GroundSetMismatch(UStatError, ValueError):
    """Two objects that must share a ground set do not."""


class OverflowDetected(UStatError, ArithmeticError):
    """An integer coefficient left the signed 64-bit range."""


# graph-analysis
class VertexAbsent(UStatError, KeyError):
    """Vertex is not in the graph."""


class TooLarge(UStatError, ValueError):
    """Exact treewidth requested on too many vertices."""


class OutOfTable(UStatError, ValueError):
    """t(e) is only tabulated for 1 <= e <= 15."""


# ustat-engine and kernels
class TooManyTerms(UStatError, ValueError):
    """Brute-force oracle would exceed the configured term cap."""


class ComponentEvaluationError(UStatError, RuntimeError):
    """A kernel component raised or produced a rejected value."""


class NonIntegerResult(UStatError, ArithmeticError):
    """A motif count did not land on an integer."""


class DimensionMismatch(UStatError, ValueError):
    """Paired samples disagree in their number of observations."""

    exit_code = 2
