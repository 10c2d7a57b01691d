"""Exception types raised across the package."""


class IndefThetaError(Exception):
    """Base class for all package-specific errors."""


class DegenerateForm(IndefThetaError):
    """The quadratic form has zero determinant."""


class NonIntegralLattice(IndefThetaError):
    """Gram matrix entries are not all integers."""


class DegenerateSpan(IndefThetaError):
    """Projection requested onto a set whose Gram matrix is singular."""


class ConeDegenerate(IndefThetaError):
    """The wall set admits no interior point."""


class ConeNotNonNegative(IndefThetaError):
    """The cone contains vectors of negative norm."""


class SpanNotNegativeDefinite(IndefThetaError):
    """A frame span is not negative definite where required."""


class SpanNotNegativeSemidefinite(IndefThetaError):
    """A frame span is not negative semidefinite where required."""


class ToleranceNotMet(IndefThetaError):
    """A quadrature failed to reach the requested tolerance."""


class TooCloseToWall(IndefThetaError):
    """Finite-difference stencil would straddle a sign discontinuity."""


class FamilyNotNegative(IndefThetaError):
    """A degenerating frame family is not negative in the required sense."""


class NonRationalEdge(IndefThetaError):
    """An isotropic edge has no rational isotropic basis."""


class OnSingularSet(IndefThetaError):
    """The Jacobi point lies on the singular set of the theta series."""


class TruncationNotConverged(IndefThetaError):
    """Radius doubling exhausted without the partial sums stabilising."""


class UnsupportedDimension(IndefThetaError):
    """Operation outside the supported desk-scale dimensions."""


class UnsupportedDegeneracy(IndefThetaError):
    """Semidefinite span whose quotient structure is outside supported cases."""


class ValidationFailed(IndefThetaError):
    """Cone validation flags failed; theta evaluation refused."""


class CertificateUnavailable(UserWarning):
    """Exact copositivity analysis out of range; result is heuristic."""
