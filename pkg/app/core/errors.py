"""Exception hierarchy shared by the numerical core and the CLI."""


class ZetaLabError(Exception):
    """Base class for every error raised by the laboratory."""


class CapacityError(ZetaLabError):
    """A table or sieve is too small (or would be too large) for the request."""


class DomainError(ZetaLabError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class PrecisionError(ZetaLabError):
    """The requested accuracy is not reachable in double precision."""


class SchemaError(ZetaLabError):
    """A CSV file does not match the schema expected by the reader."""


class NearZeroError(ZetaLabError):
    """An evaluation point sits too close to a zero; the caller should resample."""

    def __init__(self, sigma: float, t: float, modulus: float):
        self.sigma = sigma
        self.t = t
        self.modulus = modulus
        super().__init__(f"|value| = {modulus:.3e} below threshold at sigma={sigma!r}, t={t!r}")
