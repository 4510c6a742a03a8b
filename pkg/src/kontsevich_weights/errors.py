"""Exception types raised across the package."""


class KontsevichError(Exception):
    """Base class for all errors raised by this package."""


class NonTerminating(KontsevichError):
    """A hypergeometric series has no non-positive integer numerator parameter."""


class PoleInC(KontsevichError):
    """A surviving term of a terminating series divides by a zero Pochhammer symbol."""


class CoincidentPoints(KontsevichError):
    """Two points of a configuration coincide."""


class EqualRealParts(KontsevichError):
    """A sign or indicator factor is evaluated on its discontinuity."""


class DegenerateSample(KontsevichError):
    """A Monte Carlo sample landed on a measure-zero degenerate set."""


class DimensionOverflow(KontsevichError):
    """Edge count of a graph does not match the dimension of its configuration space."""


class CapExceeded(KontsevichError):
    """A requested truncation order exceeds what the jet configuration supports."""


class SingularLeadingTerm(KontsevichError):
    """The constant term of a power-series matrix is not invertible."""


class FilterViolation(KontsevichError):
    """A lifted cotangent jet carries a monomial of fiber-momentum degree two or more."""


class JetInvariantError(KontsevichError):
    """Jet data violates a structural invariant (exponential-map normalization, antisymmetry, ...)."""


class JetFileError(KontsevichError):
    """A jet file is malformed (bad field, float literal, wrong shape)."""


class ValidationFailure(KontsevichError):
    """Two independent computation routes disagree."""
