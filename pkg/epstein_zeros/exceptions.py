"""Exceptions raised by library"""
from __future__ import annotations


class EpsteinError(Exception):
    """Base exception for all library specific exceptions"""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message


class InvalidInputError(EpsteinError):
    """Input outside of the domain of an operation"""


class NumericalError(EpsteinError):
    """Numerical procedure failed to reach requested accuracy"""


class NotPositiveDefiniteError(InvalidInputError):
    """Quadratic form is not positive definite"""


class NonFundamentalDiscriminantError(InvalidInputError):
    """Discriminant is not a negative fundamental discriminant"""


class UnsupportedGroupError(InvalidInputError):
    """Class group is not cyclic"""


class UnsupportedCombinationError(InvalidInputError):
    """Combination has a vanishing merged coefficient"""


class PoleOfGammaError(InvalidInputError):
    """Argument is a pole of the gamma function"""


class PoleAtOneError(InvalidInputError):
    """Evaluation too close to the pole at s = 1"""


class VacantCoefficientError(InvalidInputError):
    """Coefficient is not determined by known constraints"""

    def __init__(self, message: str, index: tuple | None = None) -> None:
        super().__init__(message)
        self.index = index


class MissingManifestError(InvalidInputError):
    """Manifest file does not exist or cannot be parsed"""


class FixtureError(InvalidInputError):
    """Calibration fixture is missing or corrupted"""


class RepresentationNotFoundError(NumericalError):
    """No reduced form represents the prime within the search bound"""

    def __init__(self, message: str, prime: int) -> None:
        super().__init__(message)
        self.prime = prime


class NoConvergenceError(NumericalError):
    """Series or continued fraction did not converge"""


class BoundaryZeroError(NumericalError):
    """Function (nearly) vanishes on a contour"""

    def __init__(self, message: str, point: complex, modulus: float) -> None:
        super().__init__(message)
        self.point = point
        self.modulus = modulus

    def __str__(self) -> str:
        return f"{self.message} (at {self.point}, |F|={self.modulus:.3g})"
