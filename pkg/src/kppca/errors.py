"""Exception hierarchy shared by all modules.

Two branches matter for callers: DataError for anything wrong with files or
input layout, NumericError for anything wrong with the mathematics (shapes
are fine, values are not). The CLI maps them to distinct exit codes.
"""


class KppcaError(Exception):
    pass


class DataError(KppcaError):
    pass


class NumericError(KppcaError):
    pass


# --- numeric -----------------------------------------------------------


class NonFinite(NumericError):
    """Input contains NaN or Inf entries."""


class NoConvergence(NumericError):
    """The iterative eigenvalue solver failed to converge."""


class NegativeEigenvalue(NumericError):
    """An eigenvalue is negative beyond the clamping floor."""


class DimensionMismatch(NumericError):
    """Vector or matrix dimensions are incompatible."""


class LatentTooLarge(NumericError):
    """Requested latent dimension exceeds min(d, N)."""


class LatentExceedsRank(NumericError):
    """Requested latent dimension exceeds the numerical rank of the Gram matrix."""


class SigmaTooLarge(NumericError):
    """Requested noise variance exceeds lambda_1 / N; no latent dimension is admissible."""


class SigmaZero(NumericError):
    """Operation needs a strictly positive noise variance."""


class NotCentered(NumericError):
    """Gram matrix row sums are too far from zero."""


class RankDeficient(NumericError):
    """The retained spectrum contains eigenvalues at or below the clamp floor."""


class ZeroSpectrum(NumericError):
    """All eigenvalues are zero; ratios of the spectrum are undefined."""


class DegenerateNormalizer(NumericError):
    """Kernel smoother weights sum to (near) zero and no stabilizer was supplied."""


# --- data --------------------------------------------------------------


class ParseError(DataError):
    def __init__(self, message, row=None, col=None):
        if row is not None:
            message = f"{message} (row {row}" + (f", column {col})" if col is not None else ")")
        super().__init__(message)
        self.row = row
        self.col = col


class RaggedRows(DataError):
    """CSV rows do not all have the same number of fields."""


class BadMagic(DataError):
    """File does not start with the expected magic number."""


class CountMismatch(DataError):
    """Image and label files disagree on the number of items."""


class Truncated(DataError):
    """File ends before the declared payload is complete."""


class VersionMismatch(DataError):
    """Model file was written by an unknown format version."""


class CorruptFile(DataError):
    """Model file structure is damaged or inconsistent."""


class QEqualsNWarning(UserWarning):
    """q == N leaves no discarded spectrum; the noise variance is 0 by convention."""
