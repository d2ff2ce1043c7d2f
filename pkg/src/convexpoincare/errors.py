"""Exception types shared across the toolkit."""


class InvalidPolygon(ValueError):
    """Vertex list is not a non-degenerate convex polygon."""


class InvalidExponents(ValueError):
    """Exponent pair outside the admissible range."""


class BorderlineExponent(ValueError):
    """Exponent alpha = 1, where no diameter control exists."""


class DegenerateProfile(ValueError):
    pass


class DegenerateField(ValueError):
    pass


class ProfileTooCoarse(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class QNotGreaterThanP(ValueError):
    """Shape maximization requested for q <= p, where no maximizer exists."""


class ConvergenceFailure(RuntimeError):
    """Iterative solver hit its iteration cap.

    The best iterate found so far is attached as ``best`` so callers can
    still inspect or report it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class Inconclusive(RuntimeError):
    """A check could not be decided within its resolution budget."""
