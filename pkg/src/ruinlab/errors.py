"""Shared exception hierarchy."""


class RuinLabError(Exception):
    """Base class for all errors raised by this package."""


class EmbeddingNotPSD(RuinLabError):
    """Circulant embedding produced an eigenvalue below the negative tolerance."""


class TooManyPoints(RuinLabError):
    """Point set exceeds the cap for dense covariance factorization."""


class FactorizationFailure(RuinLabError):
    """Covariance matrix not numerically PSD even after diagonal jitter."""


class CapExceeded(RuinLabError):
    """Jump count cap was hit before the partial sums reached the horizon."""


class MissingConstant(RuinLabError):
    """The selected asymptotic branch needs a constant that was not supplied."""


class WrongBranch(RuinLabError):
    """Operation called outside the Hurst regime it is defined for."""


class GridTooShort(RuinLabError):
    """Quadrature grid violates the tail-truncation bound."""


class ConfigError(RuinLabError):
    """Invalid experiment configuration (bad field, bad value, bad combination)."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class IOFailure(RuinLabError):
    """Output collision or unreadable input."""


class SchemaMismatch(RuinLabError):
    """File does not carry the expected versioned schema."""
