class CascadeError(Exception):
    """Base class for every error raised by cascade_bandits."""


class ConfigError(CascadeError, ValueError):
    pass


class DataError(CascadeError, ValueError):
    pass


class NotPositiveDefiniteError(DataError):
    """Cholesky factorization failed; ``pivot`` is the zero-based failing pivot."""

    def __init__(self, pivot):
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (Cholesky pivot {pivot} <= 0)")


class UsageError(CascadeError):
    pass
