"""Exception taxonomy.

Every computational failure mode raised by the library derives from
EtaforgeError so the CLI can map them uniformly to exit code 1.
"""


class EtaforgeError(Exception):
    """Base class for all computation-level errors."""


class ZeroLeadingCoefficient(EtaforgeError):
    """Series inversion attempted on a series with no nonzero coefficient."""


class ConductorMismatch(EtaforgeError):
    """Cyclotomic embedding requested into a non-multiple conductor."""


class IntegerVector(EtaforgeError):
    """A fractional vector operation received an integral vector."""


class CongruentVectors(EtaforgeError):
    """u and v coincide up to sign modulo Z^2 where they must not."""


class PoleAtLatticePoint(EtaforgeError):
    """Weierstrass evaluation at a lattice point."""


class NotInGamma0(EtaforgeError):
    """Matrix fails the lower-left congruence required by Gamma0(N)."""


class NonPositiveImaginaryPart(EtaforgeError):
    """Evaluation point is not in the upper half-plane."""


class ConductorNotDivisibleBy4(EtaforgeError):
    """The class-invariant construction needs a conductor divisible by 4."""


class RoundingFailure(EtaforgeError):
    """A coefficient sits too far from the nearest integer to round safely."""


class NotFundamental(EtaforgeError):
    """Discriminant is not a fundamental imaginary quadratic discriminant."""


class NotUnimodular(EtaforgeError):
    """Matrix does not have determinant 1 in the required ring."""


class LevelMismatch(EtaforgeError):
    """An eta-quotient level does not divide the ambient level."""


class InsufficientBasis(EtaforgeError):
    """The decomposition system is inconsistent at the given degree bound."""

    def __init__(self, message, residual_exponent=None):
        super().__init__(message)
        self.residual_exponent = residual_exponent


class InsufficientTruncation(EtaforgeError):
    """Target series is not known to the comparison order."""


class NoRelation(EtaforgeError):
    """No rational-function relation exists within the degree bound."""
