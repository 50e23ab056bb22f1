"""Complex special functions used by the continuation formulas."""
from __future__ import annotations

from dataclasses import dataclass
import logging
import math
import threading
from typing import Final

from mpmath.ctx_mp import MPContext
import numpy as np
from scipy import special as sps

from epstein_zeros.constants import (
    DEFAULT_MAX_TERMS,
    DEFAULT_REL_ERR,
    DIGITS_PER_HEIGHT,
    DOUBLE_DIGITS,
)
from epstein_zeros.exceptions import NoConvergenceError, PoleOfGammaError

_LOGGER = logging.getLogger(__name__)

_FPMIN: Final = 1e-300
_EULER_GAMMA: Final = 0.5772156649015329
_GUARD_DIGITS: Final = 3


@dataclass(frozen=True)
class Tolerance:
    """Accuracy request for numerical routines"""

    rel_err: float = DEFAULT_REL_ERR
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_err < 1.0:
            raise ValueError(f"rel_err must lie in (0, 1), got {self.rel_err}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be positive, got {self.max_terms}")

    def tightened(self, factor: float = 10.0) -> Tolerance:
        """Tolerance one notch stricter."""
        return Tolerance(self.rel_err / factor, self.max_terms)


DEFAULT_TOLERANCE: Final = Tolerance()


def _is_gamma_pole(s: complex) -> bool:
    return s.imag == 0.0 and s.real <= 0.0 and s.real == math.floor(s.real)


def log_gamma(s: complex) -> complex:
    """Principal branch of log Gamma(s)."""
    s = complex(s)
    if _is_gamma_pole(s):
        raise PoleOfGammaError(f"Gamma has a pole at s={s.real:g}")
    return complex(sps.loggamma(s))


def rgamma(s: complex) -> complex:
    """1/Gamma(s), entire."""
    return complex(sps.rgamma(complex(s)))


def erf(x: float) -> float:
    return float(sps.erf(x))


def _continued_fraction(s: complex, x: float, tol: Tolerance) -> complex:
    """Gamma(s, x) by modified Lentz evaluation of the Legendre fraction."""
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, tol.max_terms + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol.rel_err / 4:
            return np.exp(-x + s * math.log(x)) * h
    raise NoConvergenceError(f"Continued fraction for Gamma({s}, {x}) did not converge")


def _lower_series(s: complex, x: float, tol: Tolerance) -> complex:
    """gamma(s, x) = x^s e^-x sum x^n / (s (s+1) ... (s+n))."""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(tol.max_terms):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * tol.rel_err / 4:
            return np.exp(-x + s * math.log(x)) * total
    raise NoConvergenceError(f"Series for gamma({s}, {x}) did not converge")


def _small_order(a: complex, x: float, tol: Tolerance) -> complex:
    """Gamma(a, x) for |a| < 1/2 and x < 1 without the 1/a cancellation."""
    log_x = math.log(x)
    if a == 0:
        head = -_EULER_GAMMA - log_x
    else:
        head = (np.expm1(sps.loggamma(1.0 + a)) - np.expm1(a * log_x)) / a
    tail = 0.0j
    power = 1.0
    for n in range(1, tol.max_terms + 1):
        power *= -x / n
        term = power / (a + n)
        tail += term
        if abs(term) < tol.rel_err / 4 * max(abs(head), 1e-300):
            return complex(head - np.exp(a * log_x) * tail)
    raise NoConvergenceError(f"Small order series for Gamma({a}, {x}) did not converge")


def upper_gamma(s: complex, x: float, tol: Tolerance = DEFAULT_TOLERANCE) -> complex:
    """Upper incomplete gamma Gamma(s, x) for complex s and x > 0."""
    s = complex(s)
    if x <= 0.0:
        raise ValueError(f"upper_gamma needs x > 0, got {x}")
    if x >= abs(s) + 1.0:
        return complex(_continued_fraction(s, x, tol))
    if s.real >= 0.5:
        return complex(sps.gamma(s) - _lower_series(s, x, tol))

    shift = math.ceil(-0.5 - s.real)
    a = s + shift
    small = abs(a) < 0.5
    if x >= (1.0 if small else abs(a) + 1.0):
        value = complex(_continued_fraction(a, x, tol))
    elif small:
        value = _small_order(a, x, tol)
    else:
        value = complex(sps.gamma(a) - _lower_series(a, x, tol))
    # downward recurrence Gamma(a-1, x) = (Gamma(a, x) - x^(a-1) e^-x) / (a-1)
    for _ in range(shift):
        a -= 1.0
        value = (value - np.exp(a * math.log(x) - x)) / a
    return complex(value)


def required_digits(rel_err: float, height: float) -> int:
    """Working digits for the continuation bracket at height |Im s|."""
    return (
        math.ceil(-math.log10(rel_err))
        + height_loss(height)
        + _GUARD_DIGITS
    )


def height_loss(height: float) -> int:
    """Decimal digits lost to cancellation in the bracket at height |Im s|."""
    return math.ceil(DIGITS_PER_HEIGHT * abs(height))


def needs_multiprecision(rel_err: float, height: float) -> bool:
    """Whether target and cancellation digits leave no spare digit in double precision."""
    return required_digits(rel_err, height) - _GUARD_DIGITS >= DOUBLE_DIGITS


_CONTEXTS = threading.local()


def mp_context(digits: int) -> MPContext:
    """Thread-local mpmath context set to given decimal digits."""
    ctx = getattr(_CONTEXTS, "ctx", None)
    if ctx is None:
        ctx = MPContext()
        _CONTEXTS.ctx = ctx
    ctx.dps = digits
    return ctx
