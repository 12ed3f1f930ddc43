"""Exception types raised across the package."""


class SobflowError(Exception):
    """Base class for every error raised by this package."""


# --- dense kernels ---------------------------------------------------------

class NotSymmetricError(SobflowError):
    """Input expected to be symmetric is not, beyond tolerance."""


class NoConvergenceError(SobflowError):
    """Iterative kernel exceeded its sweep/iteration cap."""


class DimensionMismatchError(SobflowError):
    """Operands have incompatible shapes."""


class NotPositiveDefiniteError(SobflowError):
    """Matrix required to be positive (semi)definite is not."""


class SingularMatrixError(SobflowError):
    """Gaussian elimination hit a negligible pivot."""


# --- diagonal symmetrizer construction -------------------------------------

class SignViolationError(SobflowError):
    """Paired off-diagonal entries violate the sign constraints."""


class InconsistentConnectionError(SobflowError):
    """Over-determined ratio constraints disagree beyond tolerance."""


class NonPositiveError(SobflowError):
    """Propagated symmetrizer entry is not strictly positive."""


class NotSortedError(SobflowError):
    """Diagonal vector is not strictly increasing and positive."""


class SingularEigenbasisError(SobflowError):
    """Supplied eigenvector matrix is numerically singular."""


class ResidualTooLargeError(SobflowError):
    """Certified residual exceeds the required tolerance."""


# --- saddle-point blocks ----------------------------------------------------

class BlockShapeMismatchError(SobflowError):
    """Block dimensions are mutually inconsistent."""


class EpsilonAtEigenvalueError(SobflowError):
    """Shift coincides with an eigenvalue of the (1,1) block."""


class ConditionsNotMetError(SobflowError):
    """Hypotheses required by the requested computation fail."""


# --- flow integration -------------------------------------------------------

class ShapeMismatchError(SobflowError):
    """State or direction does not conform to the problem shapes."""


class ZeroFieldError(SobflowError):
    """Vector field is numerically zero; there is no step to take."""


class DivergenceDetectedError(SobflowError):
    """Iterate norm blew past the divergence guard.

    The partial trajectory is attached as ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NotFullRankError(SobflowError):
    """Matrix required to have full column rank does not."""


class NotConvergedError(SobflowError):
    """Operation requires a converged trajectory."""


# --- reference oracle -------------------------------------------------------

class SymmetrizationFailedError(SobflowError):
    """Similarity transform did not produce a symmetric matrix."""


class BracketFailureError(SobflowError):
    """Expected sign change is missing from a root bracket."""
