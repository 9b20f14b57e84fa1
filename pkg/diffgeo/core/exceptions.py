"""
Error hierarchy for DiffGeo
Input problems and solver failures are kept on separate branches so the CLI
can map them onto distinct exit codes.
"""


class DiffGeoError(Exception):
    """Base class for all DiffGeo errors"""


class InvalidInputError(DiffGeoError):
    """Input violates a documented precondition (CLI exit code 2)"""


class ConvergenceError(DiffGeoError):
    """An iterative solver did not produce a trustworthy answer (CLI exit code 3)"""


# Graph construction
class NonPositiveWeight(InvalidInputError):
    pass


class DuplicateEdge(InvalidInputError):
    pass


class IndexOutOfRange(InvalidInputError):
    pass


class EmptyRow(InvalidInputError):
    """A non-absorbing vertex has no outgoing edge"""


class DimensionMismatch(InvalidInputError):
    pass


class NotIrreducible(InvalidInputError):
    pass


# Generators
class SizeTooSmall(InvalidInputError):
    pass


class BadEpsilon(InvalidInputError):
    pass


class BadBoundaryCount(InvalidInputError):
    pass


class TooFewPoints(InvalidInputError):
    pass


class DuplicatePoints(InvalidInputError):
    pass


class UnsupportedFamily(InvalidInputError):
    pass


# Diffusion
class EmptyTarget(InvalidInputError):
    pass


class BadThreshold(InvalidInputError):
    pass


# Bound checks
class EmptySublevel(InvalidInputError):
    """Sublevel set {|u| <= eps} is empty"""


class TrivialEigenvalue(InvalidInputError):
    """lambda = 0 makes the eigenvalue bound degenerate"""


class NoAbsorbingSet(InvalidInputError):
    pass


class NotAnEquationSolution(InvalidInputError):
    """Supplied vector does not satisfy the equation within tolerance"""


class NegativeU(InvalidInputError):
    pass


class PotentialTooLarge(InvalidInputError):
    pass


# Analysis
class DegenerateInput(InvalidInputError):
    """Zero variance input to a correlation"""


# Solvers
class NoConvergence(ConvergenceError):
    def __init__(self, message: str, iterations: int = 0, residual: float = float('nan')):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ComplexDominantPair(ConvergenceError):
    """Iterates oscillate: the targeted eigenvalue is part of a complex pair"""
