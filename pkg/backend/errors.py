# errors.py - Exception hierarchy shared by the library, CLI and service


class ThreeJError(Exception):
    """Base class for every error raised by the backend package"""


class InvalidArgumentsError(ThreeJError):
    """A 3j symbol violates its structural invariants or, in strict mode, its selection rules"""


class ParityError(ThreeJError):
    """A value would leave the half-integer lattice"""


class InfeasibleSpecError(ThreeJError):
    """The (a, b, sigma) triple has an empty delta range"""


class OutOfScreenError(ThreeJError):
    """An (x, delta) index lies outside the screen grid"""


class NegativeRadicandError(ThreeJError):
    """A recurrence coefficient asked for the square root of a negative number"""


class SingularCoefficientError(ThreeJError):
    """A coefficient denominator vanished with a nonzero numerator"""


class EigensolverError(ThreeJError):
    """The tridiagonal eigensolver did not converge"""


class SignAnchorError(ThreeJError):
    """The sign of an eigenvector could not be fixed from its neighbours"""


class NotATriangleError(ThreeJError):
    """Three lengths violate the triangle inequality"""


class ImaginaryRidgeError(ThreeJError):
    """The ridge J3*(delta) has a negative radicand"""


class ParseError(ThreeJError, ValueError):
    """A command-line token is not an integer or half-integer"""
