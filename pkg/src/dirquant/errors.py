"""Exception and warning taxonomy shared across the package.

Two error families matter to callers: ``DataError`` covers violated
distributional assumptions or malformed inputs (CLI exit code 3), while
``NumericalError`` covers failures of numeric procedures such as
factorizations or root finding (CLI exit code 4).
"""


class DirquantError(Exception):
    """Base class for all package-specific errors."""


class DataError(DirquantError):
    """Input data or model assumptions are violated."""


class NumericalError(DirquantError):
    """A numeric routine failed to produce a reliable result."""


class InvalidDirectionError(DataError):
    """Direction vector is not unit norm or has (near-)null components."""


class PositivityError(DataError):
    """Order statistics used as thresholds are not strictly positive."""


class HeavyTailError(DataError):
    """A tail-index estimate is non-positive where a heavy tail is required."""


class DegenerateMomentsError(DataError):
    """Log-moment statistics are degenerate (zero or collinear)."""


class DegenerateModelError(DataError):
    """Model parameters are degenerate (eigenvalue ties, |r| = 1, ...)."""


class UnsupportedDimensionError(DataError):
    """Requested dimension is outside the supported range of an oracle."""


class ResamplingError(DataError):
    """Bootstrap resampling could not retain enough usable rows."""


class FactorizationError(NumericalError):
    """Matrix factorization failed (singular or near-singular input)."""


class InversionError(NumericalError):
    """Numeric inversion (quantile root finding) did not converge."""


class EstimationWarning(UserWarning):
    """Base class for diagnostic warnings emitted by the pipeline."""


class TailDisparityWarning(EstimationWarning):
    """Marginal tail-index estimates are suspiciously far apart."""


class SmallSampleWarning(EstimationWarning):
    """Sample too small for the full bootstrap procedure; degraded path used."""


class NonFiniteCorrectionWarning(EstimationWarning):
    """A bootstrap correction factor was non-finite and replaced by 1."""


class FlooredRhoWarning(EstimationWarning):
    """Empirical tail-dependence evaluations hit the zero-count floor."""
