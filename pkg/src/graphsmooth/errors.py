"""Exception types raised by graphsmooth validation and numerics."""


class GraphSmoothError(ValueError):
    """Base class for all graphsmooth errors."""


class AsymmetricInput(GraphSmoothError):
    """Adjacency matrix is not exactly symmetric."""


class NegativeWeight(GraphSmoothError):
    """Adjacency matrix contains a negative entry."""


class NonzeroDiagonal(GraphSmoothError):
    """Adjacency matrix has a nonzero diagonal entry (self loop)."""


class TooSmall(GraphSmoothError):
    """Graph has fewer than two nodes."""


class IsolatedNode(GraphSmoothError):
    """A node has zero degree where a positive degree is required."""


class NotConnected(GraphSmoothError):
    """Graph is not connected where connectivity is required."""


class DimensionMismatch(GraphSmoothError):
    """Array shapes are inconsistent with the operator or graph size."""


class IndexOutOfRange(GraphSmoothError):
    """Eigenvalue / direction index outside 1..N."""


class NotSymmetric(GraphSmoothError):
    """Operator passed to a symmetric eigendecomposition is not symmetric."""


class ConvergenceFailure(GraphSmoothError):
    """Eigensolver or iterative search failed its accuracy contract."""


class NegativeEigenvalue(GraphSmoothError):
    """Operator expected to be positive semidefinite has a significantly
    negative eigenvalue (below the -1e-10 clamp tolerance)."""


class DegenerateDraw(GraphSmoothError):
    """Random draw degenerate (e.g. all-zero weight matrix) after a retry."""


class AlphaOutOfRange(GraphSmoothError):
    """Filter step size alpha outside (0, 1]."""


class AmbiguousLowFrequency(GraphSmoothError):
    """Top filter eigenvalue is degenerate; h_1 cannot be designated."""


class NonSymmetricFilter(GraphSmoothError):
    """Operation requires a symmetric filter matrix."""


class ZeroSignal(GraphSmoothError):
    """Signal with zero norm where a normalization is required."""


class ChannelMismatch(GraphSmoothError):
    """Channel counts of two multichannel signals disagree."""


class AssumptionViolated(GraphSmoothError):
    """Hypothesis of a theorem-mode check fails (e.g. a weight norm
    exceeds 1); the corresponding report is marked not-applicable."""


class ConfigError(GraphSmoothError):
    """Invalid experiment configuration."""
