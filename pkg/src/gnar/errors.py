"""Exception types shared across the package."""


class GnarError(ValueError):
    """Base class for all domain errors raised by this package."""


class NetworkError(GnarError):
    """Malformed network input: self-loops, duplicate edges, bad node ids."""


class OrderError(GnarError):
    """Model order or coefficient shapes are inconsistent."""


class DesignError(GnarError):
    """A design matrix cannot be built from the given panel and order."""


class RankDeficiencyError(DesignError):
    """The design matrix is rank deficient; carries the dependent columns."""

    def __init__(self, message: str, dependent_columns: list[str]):
        super().__init__(message)
        self.dependent_columns = dependent_columns


class CovarianceError(GnarError):
    """A covariance matrix is not symmetric positive definite."""


class DataError(GnarError):
    """Input data files are malformed or incomplete."""
