"""Exception and warning types raised by rankscope."""


class RankscopeError(Exception):
    """Base class for all rankscope errors."""


class BadInput(RankscopeError, ValueError):
    """Malformed numerical input (unsorted singular values, bad index sets, ...)."""


class ShapeMismatch(RankscopeError, ValueError):
    pass


class RankDeficient(RankscopeError, ArithmeticError):
    """The best rank-r approximation is not attained at a rank-r point."""


class TooFewMeasurements(RankscopeError, ValueError):
    """The sensing operator has fewer measurements than the manifold dimension."""


class SingularR(RankscopeError, ArithmeticError):
    """The triangular factor of F is numerically singular.

    The linear part of the sensing operator does not restrict to an injective
    map on the tangent space at the given point.
    """


class IndexOutOfRange(RankscopeError, IndexError):
    pass


class NoConvergence(RankscopeError, RuntimeError):
    pass


class IllConditionedFD(RankscopeError, RuntimeError):
    """Finite-difference estimates at h and h/2 disagree by more than 10%."""


class DegenerateNormal(RankscopeError, ArithmeticError):
    """No nonzero normal direction could be drawn (empty normal space)."""


class SingularValueTieWarning(RuntimeWarning):
    """sigma_r and sigma_{r+1} coincide; the truncation is not unique."""


class OrthogonalityWarning(RuntimeWarning):
    pass
