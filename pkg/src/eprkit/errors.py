"""Exception types shared across the package."""


class EprError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(EprError, ValueError):
    """Operands live on incompatible spaces."""


class NonHermitianError(EprError, ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class DegenerateSpectrumError(EprError, ValueError):
    """An operation requires a nondegenerate spectrum but got repeated eigenvalues."""


class ImpossibleOutcomeError(EprError, ValueError):
    """Conditioning was requested on an outcome of (numerically) zero probability."""


class SpectrumCoverageError(EprError, ValueError):
    """A value does not match any spectrum entry, or a function table misses one."""


class ScenarioFormatError(EprError, ValueError):
    """A scenario or report file does not conform to the JSON schema."""


class ScenarioInvariantError(EprError, ValueError):
    """A scenario file parsed but violates a physical invariant."""
