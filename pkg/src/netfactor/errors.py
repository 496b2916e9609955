"""Exception hierarchy for netfactor.

Every error raised on purpose by the package derives from
:class:`NetfactorError`, so callers can catch the whole family at once.
"""


class NetfactorError(Exception):
    """Base class for all package errors."""


class NumericalError(NetfactorError):
    """A numerical routine could not produce a trustworthy answer."""


class SingularSylvester(NumericalError):
    """Lyapunov/Sylvester operator is singular (eigenvalues sum to zero)."""


class NotSymmetric(NetfactorError, ValueError):
    """A matrix that must be symmetric is not, within tolerance."""


class NonFiniteMatrix(NetfactorError, ValueError):
    """A matrix contains NaN or Inf entries."""


class DimensionTooLarge(NetfactorError):
    """Problem exceeds the enumeration size cap."""


class EigensolverFailure(NumericalError):
    """An eigenvalue or Schur decomposition did not converge."""


class SingularTransformation(NumericalError):
    """A state transformation is not invertible."""


class PoleHit(NumericalError):
    """Evaluation point coincides with a pole."""


class NonSquare(NetfactorError, ValueError):
    """Operation requires a square transfer matrix."""


class ImproperFraction(NetfactorError, ValueError):
    """Numerator degree exceeds denominator degree."""


class NotCoprime(NetfactorError, ValueError):
    """Numerator and denominator share a root."""


class ShapeViolation(NetfactorError, ValueError):
    """System is not in the C = [I 0], D = 0 shape."""


class DimensionMismatch(NetfactorError, ValueError):
    """Objects being compared have incompatible dimensions."""


class AssumptionViolation(NetfactorError, ValueError):
    """A modelling assumption required by the operation fails."""


class NonMinimalV(AssumptionViolation):
    """A diagonal entry of V is identically zero."""


class Unstable(AssumptionViolation):
    """State matrix is not Hurwitz."""


class NotControllable(NumericalError):
    """Riccati data pair is not controllable."""


class NotRelativeDegreeZero(AssumptionViolation):
    """Noise gain right-hand side is not diagonal positive definite."""


class NoPositiveDefiniteR(NumericalError):
    """No Riccati solution yields a positive definite covariance."""


class NoneMinimumPhase(NumericalError):
    """No member of a solution set is minimum phase."""


class MultipleMinimumPhase(NumericalError):
    """More than one member of a solution set is minimum phase."""


class EmptyDomain(NetfactorError, ValueError):
    """No admissible nonzero parameter exists."""


class GenerationExhausted(NetfactorError):
    """Random generation hit its rejection limit."""


class FileFormatError(NetfactorError, ValueError):
    """A system, certificate or config document could not be parsed."""
