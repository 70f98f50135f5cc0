"""Exception and warning types raised across the package."""


class StableFitError(Exception):
    """Base class for data and numerical errors (CLI exit status 1)."""


class DomainError(StableFitError, ValueError):
    pass


class IntegrationFailure(StableFitError):
    """Fourier inversion did not reach the requested tolerance."""


class EmptyData(StableFitError, ValueError):
    pass


class InsufficientData(StableFitError, ValueError):
    pass


class DegenerateCF(StableFitError):
    """Empirical CF modulus sits at 0 or 1 on most of the regression grid."""


class AlphaNearOne(StableFitError):
    """tan(pi*alpha/2) diverges; the beta/delta regression is ill-posed."""


class GridMismatch(StableFitError, ValueError):
    pass


class InsufficientTail(StableFitError, ValueError):
    pass


class NonPositive(StableFitError, ValueError):
    pass


class EmptyTail(StableFitError, ValueError):
    pass


class DegenerateTail(StableFitError, ValueError):
    pass


class NonFiniteDensity(StableFitError):
    """A model assigns zero (or non-finite) density to an observed point."""


class SupportMismatch(StableFitError):
    pass


class ParseError(StableFitError):
    pass


class SchemaError(StableFitError):
    pass


class EmptyFile(StableFitError):
    pass


class NoAlignedPairs(StableFitError):
    pass


class NonConvergenceWarning(UserWarning):
    """The standardization loop hit max_iter; the result is still returned."""
