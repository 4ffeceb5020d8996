"""Exception hierarchy shared by all modules."""


class SsirError(ValueError):
    """Base class for invalid input or failed estimation."""


class NotPositiveDefiniteError(SsirError):
    pass


class DegenerateResponseError(SsirError):
    pass


class ConvergenceError(SsirError):
    pass


class RankError(SsirError):
    """Rank-deficient basis or mismatched ambient dimensions."""


class EmbeddingError(SsirError):
    """Circulant embedding stayed indefinite after the allowed padding."""
