"""Exception types shared across the package."""


class DispmaxError(Exception):
    """Base class for all package errors."""


class ConfigError(DispmaxError):
    """Invalid experiment configuration (bad key, value out of range)."""


class NonconformingProfileError(DispmaxError):
    """Dispersion profile fails the curvature conditions on the sampled range."""

    def __init__(self, message, c1_est=None, c2_est=None):
        super().__init__(message)
        self.c1_est = c1_est
        self.c2_est = c2_est


class AliasingError(DispmaxError):
    """Requested frequency shell exceeds the grid Nyquist frequency."""


class ResolutionError(DispmaxError):
    """Scan grid too coarse for the band limit of the input signal."""


class QuadratureError(DispmaxError):
    """Oscillatory quadrature exceeded its panel budget."""


class HypothesisError(DispmaxError):
    """A lemma hypothesis (derivative bound, monotonicity) fails on samples."""
