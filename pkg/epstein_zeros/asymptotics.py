"""Main-term constants of the zero density asymptotics and checks of the
auxiliary bounds they rest on.

Integrals over the max-regions R_l = {u : u_l = max_j u_j} reduce to one
dimension. On R_l with u_l = x the other coordinates range independently
over (-inf, x], so

    int_{R_l} u_l^p u^m e^(-sum u_j^2 / xi_j) du
        = int x^(p + m_l) e^(-x^2 / xi_l) prod_{j != l} M_j(x) dx,
    M_j(x) = int_{-inf}^x y^(m_j) e^(-y^2 / xi_j) dy,

and M_j has a closed form through the regularized incomplete gamma function.
The log-modulus integrals (I_{m,n} and the moment envelope) are estimated by
Gaussian importance sampling with keyed streams, so a (seed, N) pair always
yields the same numbers.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
import itertools
import json
import logging
import math
from pathlib import Path
from typing import Any, Final, Iterator, Sequence

import numpy as np
from scipy import integrate
from scipy import special as sps

from epstein_zeros.constants import (
    CALIBRATION_FILE,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    NONREAL_XI,
    REAL_XI,
    SCHEMA_VERSION,
)
from epstein_zeros.epstein import CombinationSpec
from epstein_zeros.exceptions import (
    FixtureError,
    InvalidInputError,
    VacantCoefficientError,
)
from epstein_zeros.randmodel import McEstimate
from epstein_zeros.streams import KeyedStream
from epstein_zeros.util import loglog, pairwise_sum

_LOGGER = logging.getLogger(__name__)

_QUAD_EPS: Final = 1e-12
_QUAD_LIMIT: Final = 200
_MIN_I_SAMPLES: Final = 10_000
_ENVELOPE_MARGIN: Final = 1.25
_MOMENT_ORDERS: Final = (1, 2, 3)
_MOMENT_SCALES: Final = (1.0, 100.0)
MOMENT_GRID: Final = (1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0)
LOG_INTEGRAL_EPS: Final = (0.2, 0.1, 0.05, 0.02)
LOG_INTEGRAL_RADIUS: Final = 2.0
LOG_INTEGRAL_GRID: Final = 20

FIXTURE_PATH: Final = Path(__file__).parent / "fixtures" / CALIBRATION_FILE


def _normalized(b: Sequence[complex]) -> tuple[complex, ...]:
    norm = math.sqrt(sum(abs(value) ** 2 for value in b))
    if norm == 0.0:
        raise InvalidInputError("Coefficients must not all vanish")
    return tuple(complex(value) / norm for value in b)


def _check_xi(xi: Sequence[int]) -> tuple[int, ...]:
    xi = tuple(int(value) for value in xi)
    if not xi:
        raise InvalidInputError("xi needs at least one entry")
    if any(value not in (REAL_XI, NONREAL_XI) for value in xi):
        raise InvalidInputError(f"xi values must be {NONREAL_XI} or {REAL_XI}: {xi}")
    return xi


@dataclass(frozen=True)
class MainTermParams:
    """Inputs of the main terms.

    theta and T enter every formula only through L = theta * log log T. A
    parameter set built from L alone has no height and cannot produce the
    zero density main term.
    """

    xi: tuple[int, ...]
    b: tuple[complex, ...]
    L: float  # pylint: disable=invalid-name
    theta: float | None = None
    T: float | None = None  # pylint: disable=invalid-name

    def __post_init__(self) -> None:
        _check_xi(self.xi)
        if len(self.b) != len(self.xi):
            raise InvalidInputError(
                f"b has {len(self.b)} entries but xi has {len(self.xi)}"
            )
        if abs(sum(abs(value) ** 2 for value in self.b) - 1.0) > 1e-9:
            raise InvalidInputError(f"b must satisfy sum |b_j|^2 = 1: {self.b}")
        if not self.L > 0.0:
            raise InvalidInputError(f"L = theta log log T must be positive, got {self.L}")
        if self.theta is not None and not 0.0 < self.theta < 1.0:
            raise InvalidInputError(f"theta must lie in (0, 1), got {self.theta}")

    @classmethod
    def from_L(  # pylint: disable=invalid-name
        cls, xi: Sequence[int], b: Sequence[complex], L: float
    ) -> MainTermParams:
        return cls(xi=_check_xi(xi), b=_normalized(b), L=float(L))

    @classmethod
    def from_theta_T(  # pylint: disable=invalid-name
        cls, xi: Sequence[int], b: Sequence[complex], theta: float, T: float
    ) -> MainTermParams:
        if T <= math.e:
            raise InvalidInputError(f"T must exceed e, got {T}")
        return cls(
            xi=_check_xi(xi),
            b=_normalized(b),
            L=theta * loglog(T),
            theta=float(theta),
            T=float(T),
        )

    @classmethod
    def from_spec(
        cls, spec: CombinationSpec, theta: float, T: float  # pylint: disable=invalid-name
    ) -> MainTermParams:
        return cls.from_theta_T(spec.xi, spec.b, theta, T)

    @property
    def J(self) -> int:  # pylint: disable=invalid-name
        return len(self.xi)

    @property
    def xi_product(self) -> int:
        return math.prod(self.xi)

    @property
    def loglog_T(self) -> float:  # pylint: disable=invalid-name
        """log log T; equals L when no theta was given."""
        return self.L / self.theta if self.theta else self.L

    @property
    def prefactor(self) -> float:
        """1 / sqrt(xi pi^J)."""
        return 1.0 / math.sqrt(self.xi_product * math.pi**self.J)

    def with_theta(self, theta: float) -> MainTermParams:
        """Same height and coefficients at another theta."""
        return MainTermParams(
            xi=self.xi, b=self.b, L=theta * self.loglog_T, theta=theta, T=self.T
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "J": self.J,
            "xi": list(self.xi),
            "b": [{"re": z.real, "im": z.imag} for z in self.b],
            "L": self.L,
            "theta": self.theta,
            "T": self.T,
        }


# Region integrals


def _lower_moment(k: int, xi: float, x: float) -> float:
    """int_{-inf}^x y^k e^(-y^2 / xi) dy."""
    z = x / math.sqrt(xi)
    scale = xi ** ((k + 1) / 2)
    if k == 0:
        return scale * math.sqrt(math.pi) / 2.0 * float(sps.erfc(-z))
    order = (k + 1) / 2
    tail = 0.5 * float(sps.gamma(order) * sps.gammaincc(order, z * z))
    if z < 0.0:
        return scale * (-1) ** k * tail
    full = float(sps.gamma(order)) if k % 2 == 0 else 0.0
    return scale * (full - tail)


def region_moment(
    l: int, xi: Sequence[int], m: Sequence[int] | None = None, power: int = 0
) -> float:
    """int over R_l of u_l^power u^m e^(-sum u_j^2 / xi_j) du (l is 0-based)."""
    size = len(xi)
    if not 0 <= l < size:
        raise InvalidInputError(f"Region index {l} out of range for J={size}")
    m = tuple(m) if m is not None else (0,) * size
    if len(m) != size or any(value < 0 for value in m):
        raise InvalidInputError(f"Monomial exponent {m} does not fit J={size}")
    exponent = power + m[l]
    others = [(m[j], float(xi[j])) for j in range(size) if j != l]

    def integrand(x: float) -> float:
        value = x**exponent * math.exp(-x * x / xi[l])
        for order, width in others:
            value *= _lower_moment(order, width, x)
        return value

    total = 0.0
    for lower, upper in ((-math.inf, 0.0), (0.0, math.inf)):
        value, _ = integrate.quad(
            integrand, lower, upper, epsabs=_QUAD_EPS, epsrel=_QUAD_EPS, limit=_QUAD_LIMIT
        )
        total += value
    return total


def region_weight(l: int, xi: Sequence[int]) -> float:
    """Gaussian mass of R_l."""
    return region_moment(l, xi)


def region_weights(xi: Sequence[int]) -> list[float]:
    return [region_weight(l, xi) for l in range(len(xi))]


def region_integral_u(xi: Sequence[int]) -> float:
    """sum_l int_{R_l} u_l e^(-sum u_j^2 / xi_j) du."""
    return sum(region_moment(l, xi, power=1) for l in range(len(xi)))


# Coefficients


def d_coeff(n: Sequence[int], xi: Sequence[int]) -> float:
    """d_n = int v^n e^(-sum v_j^2 / xi_j) dv."""
    if len(n) != len(xi) or any(value < 0 for value in n):
        raise InvalidInputError(f"Index {tuple(n)} does not fit xi={tuple(xi)}")
    if any(value % 2 for value in n):
        return 0.0
    return math.prod(
        width ** ((order + 1) / 2) * math.gamma((order + 1) / 2)
        for order, width in zip(n, xi)
    )


def btilde(k: Sequence[int], l: Sequence[int]) -> float:
    """Known coefficients of the characteristic function expansion."""
    weight = sum(k) + sum(l)
    if weight == 0:
        return 1.0
    if weight == 1 or weight > 5:
        return 0.0
    raise VacantCoefficientError(
        f"Coefficient of weight {weight} at k={tuple(k)}, l={tuple(l)} is not determined",
        index=(tuple(k), tuple(l)),
    )


def q_coeff(  # pylint: disable=too-many-arguments
    k: Sequence[int],
    l: Sequence[int],
    m: Sequence[int],
    n: Sequence[int],
    xi: Sequence[int],
) -> complex:
    """Coefficient q_{k,l:m,n} of the density expansion."""
    size = len(xi)
    if any(len(vector) != size for vector in (k, l, m, n)):
        raise InvalidInputError(f"Index vectors must have length J={size}")
    if any(value < 0 for vector in (k, l, m, n) for value in vector):
        raise InvalidInputError("Indices must be non-negative")
    first = [2 * kj + mj for kj, mj in zip(k, m)]
    second = [2 * lj + nj for lj, nj in zip(l, n)]
    weight = sum(first) + sum(second)
    if weight == 1 or weight > 5:
        return 0j
    value = btilde(first, second) / (
        1j ** (sum(m) + sum(n)) * math.pi ** (2 * size + weight)
    )
    for j in range(size):
        value *= (
            math.gamma(k[j] + 0.5)
            * math.gamma(l[j] + 0.5)
            / xi[j] ** (k[j] + l[j] + m[j] + n[j] + 1)
        )
        value *= math.comb(first[j], m[j]) * math.comb(second[j], n[j])
    return complex(value)


def q_origin(xi: Sequence[int]) -> float:
    """q_{0,0:0,0} = pi^-J / prod xi_j."""
    zeros = (0,) * len(xi)
    return q_coeff(zeros, zeros, zeros, zeros, xi).real


def _weighted_vectors(weights: Sequence[int], limit: int) -> Iterator[tuple[int, ...]]:
    """Non-negative vectors c with sum weights[i] * c[i] <= limit."""
    if not weights:
        yield ()
        return
    for count in range(limit // weights[0] + 1):
        for tail in _weighted_vectors(weights[1:], limit - weights[0] * count):
            yield (count,) + tail


@dataclass
class CoefficientTable:
    """d and q coefficients up to a total weight"""

    xi: tuple[int, ...]
    max_weight: int
    d: dict[tuple[int, ...], float] = field(default_factory=dict)
    q: dict[tuple[tuple[int, ...], ...], complex] = field(default_factory=dict)
    vacant: list[tuple[tuple[int, ...], ...]] = field(default_factory=list)

    @classmethod
    def build(cls, xi: Sequence[int], max_weight: int = 5) -> CoefficientTable:
        xi = _check_xi(xi)
        size = len(xi)
        table = cls(xi=xi, max_weight=max_weight)
        for n in _weighted_vectors((1,) * size, max_weight):
            table.d[n] = d_coeff(n, xi)
        for flat in _weighted_vectors((2,) * (2 * size) + (1,) * (2 * size), max_weight):
            index = tuple(flat[i * size:(i + 1) * size] for i in range(4))
            try:
                table.q[index] = q_coeff(*index, xi)
            except VacantCoefficientError:
                table.vacant.append(index)
        _LOGGER.debug(
            "Coefficient table xi=%s K<=%d: %d q known, %d vacant",
            xi,
            max_weight,
            len(table.q),
            len(table.vacant),
        )
        return table

    def btilde_known(self) -> dict[tuple[tuple[int, ...], tuple[int, ...]], float]:
        """Constraints on the characteristic function coefficients up to max_weight."""
        size = len(self.xi)
        known = {}
        for flat in _weighted_vectors((1,) * (2 * size), self.max_weight):
            k, l = flat[:size], flat[size:]
            try:
                known[(k, l)] = btilde(k, l)
            except VacantCoefficientError:
                continue
        return known


# Main terms


def density_G_leading(  # pylint: disable=invalid-name
    u: Sequence[float] | np.ndarray,
    v: Sequence[float] | np.ndarray,
    params: MainTermParams,
) -> np.ndarray | float:
    """Leading term of the density of (Re, Im) of the log vector, scaled by L."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    widths = np.asarray(params.xi, dtype=float) * params.L
    exponent = np.sum((u * u + v * v) / widths, axis=-1)
    value = q_origin(params.xi) * params.L ** (-params.J) * np.exp(-exponent)
    return float(value) if np.ndim(value) == 0 else value


def density_mass(params: MainTermParams, nodes: int = 8) -> float:
    """Total mass of density_G_leading by a tensor Gauss-Hermite rule."""
    if params.J > 3:
        raise InvalidInputError(f"Tensor quadrature is limited to J <= 3, got J={params.J}")
    base, weights = np.polynomial.hermite.hermgauss(nodes)
    widths = np.sqrt(np.asarray(params.xi, dtype=float) * params.L)
    # x = c y turns int f dx into c sum w e^(y^2) f(c y) per coordinate
    axes = [base * width for width in np.concatenate([widths, widths])]
    factors = [weights * np.exp(base**2) * width for width in np.concatenate([widths, widths])]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * params.J)
    weight = np.ones(1)
    for factor in factors:
        weight = np.multiply.outer(weight, factor).ravel()
    values = density_G_leading(grid[:, : params.J], grid[:, params.J :], params)
    return float(np.dot(weight, values))


def expt_main_term(params: MainTermParams) -> float:
    """Main term of E log |F_J(sigma_T : X)|."""
    growth = math.sqrt(params.L) * params.prefactor * region_integral_u(params.xi)
    weights = region_weights(params.xi)
    offset = params.prefactor * sum(
        math.log(abs(value)) * weight for value, weight in zip(params.b, weights)
    )
    return growth + offset


def zero_density_main_term(params: MainTermParams) -> float:
    """Main term of the number of zeros with Re s > sigma_T, T < Im s < 2T."""
    if params.T is None or params.theta is None:
        raise InvalidInputError("Zero density main term needs theta and T")
    height = params.T
    return (
        height
        * math.log(height) ** params.theta
        / (4.0 * math.pi ** (1.0 + params.J / 2.0) * math.sqrt(params.xi_product * params.L))
        * region_integral_u(params.xi)
    )


def main_term_report(params: MainTermParams) -> dict[str, Any]:
    """All constants of the main terms in one mapping."""
    zeros = (0,) * params.J
    report: dict[str, Any] = {
        "params": params.to_json(),
        "expt_main": expt_main_term(params),
        "zero_density_main": None,
        "region_integral_u": region_integral_u(params.xi),
        "weights": region_weights(params.xi),
        "d0": d_coeff(zeros, params.xi),
        "q0000": q_origin(params.xi),
    }
    if params.T is not None:
        report["zero_density_main"] = zero_density_main_term(params)
    return report


# Log-modulus integrals by importance sampling


def _log_abs_sum(b: Sequence[complex], exponents: np.ndarray) -> np.ndarray:
    """log |sum_j b_j e^(z_j)| row-wise without overflow."""
    shift = np.max(exponents.real, axis=-1, keepdims=True)
    total = pairwise_sum(np.asarray(b, dtype=complex) * np.exp(exponents - shift))
    return shift[..., 0] + np.log(np.abs(total))


def _gaussian_sample(
    widths: Sequence[float], n_samples: int, seed: int, domain: str, threads: int
) -> tuple[np.ndarray, np.ndarray]:
    """u, v with density proportional to exp(-sum (u_j^2 + v_j^2) / width_j)."""
    size = len(widths)
    draws = KeyedStream(seed, domain).normal_rows(n_samples, 2 * size, threads)
    scale = np.sqrt(np.asarray(widths, dtype=float) / 2.0)
    return draws[:, :size] * scale, draws[:, size:] * scale


def _estimate(values: np.ndarray) -> McEstimate:
    count = len(values)
    mean = float(pairwise_sum(values) / count)
    stderr = float(np.std(values, ddof=1) / math.sqrt(count)) if count > 1 else math.inf
    return McEstimate(mean, stderr, count, 0)


def _I_mn_values(  # pylint: disable=invalid-name,too-many-arguments
    m: Sequence[int],
    n: Sequence[int],
    params: MainTermParams,
    n_samples: int,
    seed: int,
    threads: int,
) -> np.ndarray:
    size = params.J
    if len(m) != size or len(n) != size:
        raise InvalidInputError(f"Exponents must have length J={size}")
    if sum(m) + sum(n) > 4:
        raise InvalidInputError(f"Total exponent of m={tuple(m)}, n={tuple(n)} exceeds 4")
    if n_samples < _MIN_I_SAMPLES:
        raise InvalidInputError(f"Needs at least {_MIN_I_SAMPLES} samples, got {n_samples}")
    # the same (seed, xi) gives the same points at every L
    u, v = _gaussian_sample(params.xi, n_samples, seed, f"I_mn/{params.xi}", threads)
    mass = math.pi**size * params.xi_product
    monomial = np.prod(u ** np.asarray(m) * v ** np.asarray(n), axis=1)
    logs = _log_abs_sum(params.b, (u + 1j * v) * math.sqrt(params.L))
    return mass * logs * monomial


def eval_I_mn(  # pylint: disable=invalid-name,too-many-arguments
    m: Sequence[int],
    n: Sequence[int],
    params: MainTermParams,
    n_samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> McEstimate:
    """int log |sum_j b_j e^((u_j + i v_j) sqrt L)| e^(-sum (u_j^2+v_j^2)/xi_j) u^m v^n."""
    return _estimate(_I_mn_values(m, n, params, n_samples, seed, threads))


def I_mn_main_terms(  # pylint: disable=invalid-name
    m: Sequence[int], n: Sequence[int], params: MainTermParams
) -> tuple[float, float]:
    """Growth and offset parts of I_{m,n} from the dominant term on each R_l."""
    d_n = d_coeff(n, params.xi)
    if d_n == 0.0:
        return 0.0, 0.0
    growth = sum(region_moment(l, params.xi, m, power=1) for l in range(params.J))
    offset = sum(
        math.log(abs(params.b[l])) * region_moment(l, params.xi, m)
        for l in range(params.J)
    )
    return math.sqrt(params.L) * d_n * growth, d_n * offset


def I_mn_error(  # pylint: disable=invalid-name,too-many-arguments
    m: Sequence[int],
    n: Sequence[int],
    params: MainTermParams,
    n_samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> McEstimate:
    """I_{m,n} minus its two main terms."""
    estimate = eval_I_mn(m, n, params, n_samples, seed, threads)
    growth, offset = I_mn_main_terms(m, n, params)
    return McEstimate(
        estimate.mean - growth - offset, estimate.stderr, estimate.n_samples, 0
    )


@dataclass(frozen=True)
class EnvelopeFit:
    """Single constant C with |error(L)| <= C L^-1/4 across L"""

    constant: float
    holds: bool
    L: tuple[float, ...]  # pylint: disable=invalid-name
    errors: tuple[float, ...]
    stderrs: tuple[float, ...]

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def prop_error_fit(
    L_values: Sequence[float],  # pylint: disable=invalid-name
    errors: Sequence[McEstimate],
    margin: float = _ENVELOPE_MARGIN,
) -> EnvelopeFit:
    """Least squares C for |error| ~ C L^-1/4; holds if every point sits under
    margin * C L^-1/4 up to three standard errors."""
    if len(L_values) != len(errors) or not errors:
        raise InvalidInputError("Need one error estimate per L value")
    scales = np.asarray(L_values, dtype=float) ** -0.25
    sizes = np.abs([error.mean for error in errors])
    stderrs = np.asarray([error.stderr for error in errors])
    constant = float(np.dot(sizes, scales) / np.dot(scales, scales))
    holds = bool(np.all(sizes <= margin * constant * scales + 3.0 * stderrs))
    return EnvelopeFit(
        constant,
        holds,
        tuple(float(value) for value in L_values),
        tuple(float(value) for value in sizes),
        tuple(float(value) for value in stderrs),
    )


@dataclass(frozen=True)
class DifferenceReport:  # pylint: disable=too-many-instance-attributes
    """theta^alpha I(theta) differences against their two-term expansion"""

    alpha: float
    theta1: float
    theta2: float
    difference: float
    stderr: float
    expansion: float
    residual: float
    allowance: float
    within: bool

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def difference_expansion(  # pylint: disable=too-many-arguments
    alpha: float,
    theta1: float,
    theta2: float,
    m: Sequence[int],
    n: Sequence[int],
    params: MainTermParams,
    at: float | None = None,
) -> float:
    """Two explicit terms of theta1^a I(theta1) - theta2^a I(theta2), expanded at theta2."""
    step = theta1 - theta2
    theta = theta2 if at is None else at
    d_n = d_coeff(n, params.xi)
    growth = sum(region_moment(l, params.xi, m, power=1) for l in range(params.J))
    offset = sum(
        math.log(abs(params.b[l])) * region_moment(l, params.xi, m)
        for l in range(params.J)
    )
    return (
        step
        * math.sqrt(params.loglog_T)
        * d_n
        * (alpha + 0.5)
        * theta ** (alpha - 0.5)
        * growth
        + step * d_n * alpha * theta ** (alpha - 1.0) * offset
    )


def difference_check(  # pylint: disable=too-many-arguments
    alpha: float,
    theta1: float,
    theta2: float,
    m: Sequence[int],
    n: Sequence[int],
    params: MainTermParams,
    n_samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> DifferenceReport:
    """Monte Carlo difference with common random numbers versus the expansion."""
    if not theta1 >= theta2 > 0.0:
        raise InvalidInputError(f"Needs theta1 >= theta2 > 0, got {theta1}, {theta2}")
    step = theta1 - theta2
    depth = params.loglog_T
    allowance = step / depth**0.25 + step * step * math.sqrt(depth)
    if step == 0.0:
        return DifferenceReport(alpha, theta1, theta2, 0.0, 0.0, 0.0, 0.0, allowance, True)
    first = _I_mn_values(m, n, params.with_theta(theta1), n_samples, seed, threads)
    second = _I_mn_values(m, n, params.with_theta(theta2), n_samples, seed, threads)
    estimate = _estimate(theta1**alpha * first - theta2**alpha * second)
    expansion = difference_expansion(alpha, theta1, theta2, m, n, params)
    residual = estimate.mean - expansion
    within = abs(residual) <= 3.0 * estimate.stderr + allowance
    _LOGGER.debug(
        "Difference alpha=%g H=%g: mc=%g expansion=%g allowance=%g",
        alpha,
        step,
        estimate.mean,
        expansion,
        allowance,
    )
    return DifferenceReport(
        alpha,
        theta1,
        theta2,
        estimate.mean,
        estimate.stderr,
        expansion,
        residual,
        allowance,
        within,
    )


# Envelope checks


def logint_bound_check(z: complex, eps: float) -> float:
    """int_eps^1 |log |u + z|| du / u."""
    if not 0.0 < eps < 1.0:
        raise InvalidInputError(f"eps must lie in (0, 1), got {eps}")
    z = complex(z)
    breaks = {eps, 1.0}
    if z.imag == 0.0 and eps < -z.real < 1.0:
        breaks.add(-z.real)
    # |u + z| = 1 switches the sign of the logarithm
    if abs(z.imag) < 1.0:
        reach = math.sqrt(1.0 - z.imag * z.imag)
        for point in (-z.real - reach, -z.real + reach):
            if eps < point < 1.0:
                breaks.add(point)

    def integrand(u: float) -> float:
        return abs(math.log(abs(u + z))) / u

    nodes = sorted(breaks)
    total = 0.0
    for lower, upper in zip(nodes, nodes[1:]):
        value, _ = integrate.quad(
            integrand, lower, upper, epsabs=_QUAD_EPS, epsrel=1e-10, limit=_QUAD_LIMIT
        )
        total += value
    return total


def _disc_grid(radius: float, size: int) -> list[complex]:
    axis = np.linspace(-radius, radius, size)
    return [complex(x, y) for x, y in itertools.product(axis, axis) if math.hypot(x, y) <= radius]


@dataclass(frozen=True)
class EnvelopeReport:
    """Worst ratio of an estimate to its envelope over a grid"""

    constant: float
    worst: float
    worst_at: dict[str, Any]
    holds: bool

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def _log_integral_worst(
    eps_values: Sequence[float], radius: float, grid: int
) -> tuple[float, dict[str, Any]]:
    worst, worst_at = -math.inf, {}
    for eps in eps_values:
        for z in _disc_grid(radius, grid):
            value = eps * logint_bound_check(z, eps)
            if value > worst:
                worst, worst_at = value, {"z": {"re": z.real, "im": z.imag}, "eps": eps}
    return worst, worst_at


def logint_envelope(
    constant: float | None = None,
    eps_values: Sequence[float] = LOG_INTEGRAL_EPS,
    radius: float = LOG_INTEGRAL_RADIUS,
    grid: int = LOG_INTEGRAL_GRID,
) -> EnvelopeReport:
    """eps * int_eps^1 |log|u+z|| du/u <= C over |z| <= radius."""
    if constant is None:
        constant = load_calibration().log_integral
    worst, worst_at = _log_integral_worst(eps_values, radius, grid)
    return EnvelopeReport(constant, worst, worst_at, worst <= constant)


def moment_envelope(k: int, M: float, J: int) -> float:  # pylint: disable=invalid-name
    """M^(J+k) k^k + M^J k^(2k)."""
    return M ** (J + k) * k**k + M**J * k ** (2 * k)


def moment_estimate(  # pylint: disable=invalid-name,too-many-arguments
    k: int,
    M: float,
    b: Sequence[complex],
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> McEstimate:
    """int |log |sum_j b_j e^(u_j + i v_j)||^(2k) e^(-sum (u_j^2+v_j^2)/M) du dv."""
    if k not in _MOMENT_ORDERS:
        raise InvalidInputError(f"k must be one of {_MOMENT_ORDERS}, got {k}")
    if not _MOMENT_SCALES[0] <= M <= _MOMENT_SCALES[1]:
        raise InvalidInputError(f"M must lie in {list(_MOMENT_SCALES)}, got {M}")
    size = len(b)
    u, v = _gaussian_sample((M,) * size, n_samples, seed, f"moment/{size}", threads)
    mass = (math.pi * M) ** size
    logs = _log_abs_sum(b, u + 1j * v)
    return _estimate(mass * np.abs(logs) ** (2 * k))


@dataclass(frozen=True)
class MomentReport:
    """Moment estimate against its calibrated envelope"""

    k: int
    M: float  # pylint: disable=invalid-name
    estimate: McEstimate
    constant: float
    bound: float
    holds: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "M": self.M,
            "estimate": self.estimate.to_json(),
            "constant": self.constant,
            "bound": self.bound,
            "holds": self.holds,
        }


def moment_bound_check(  # pylint: disable=invalid-name,too-many-arguments
    k: int,
    M: float,
    b: Sequence[complex],
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    constant: float | None = None,
    threads: int = 1,
) -> MomentReport:
    if constant is None:
        constant = load_calibration().moment_constant(len(b))
    estimate = moment_estimate(k, M, b, n_samples, seed, threads)
    bound = constant * moment_envelope(k, M, len(b))
    return MomentReport(k, M, estimate, constant, bound, estimate.mean <= bound)


# Calibration fixture


@dataclass
class Calibration:
    """Frozen envelope constants"""

    moment: dict[int, float]
    log_integral: float
    margin: float = _ENVELOPE_MARGIN
    moment_grid: tuple[float, ...] = MOMENT_GRID

    def moment_constant(self, J: int) -> float:  # pylint: disable=invalid-name
        try:
            return self.moment[J]
        except KeyError as ex:
            raise FixtureError(
                f"No moment envelope constant for J={J}, recalibrate first"
            ) from ex

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "margin": self.margin,
            "moment_envelope": {
                "k": 1,
                "M_grid": list(self.moment_grid),
                "A": {str(J): value for J, value in sorted(self.moment.items())},
            },
            "log_integral_envelope": {
                "radius": LOG_INTEGRAL_RADIUS,
                "eps": list(LOG_INTEGRAL_EPS),
                "C": self.log_integral,
            },
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Calibration:
        try:
            moment = {int(J): float(value) for J, value in data["moment_envelope"]["A"].items()}
            log_integral = float(data["log_integral_envelope"]["C"])
            margin = float(data.get("margin", _ENVELOPE_MARGIN))
            grid = tuple(float(M) for M in data["moment_envelope"].get("M_grid", MOMENT_GRID))
        except (KeyError, TypeError, ValueError, AttributeError) as ex:
            raise FixtureError(f"Calibration data is malformed: {ex}") from ex
        if log_integral <= 0.0 or any(value <= 0.0 for value in moment.values()):
            raise FixtureError("Calibration constants must be positive")
        return cls(moment, log_integral, margin, grid)


def load_calibration(path: str | Path | None = None) -> Calibration:
    path = Path(path) if path is not None else FIXTURE_PATH
    try:
        with open(path, encoding="utf-8") as stream:
            data = json.load(stream)
    except FileNotFoundError as ex:
        raise FixtureError(f"Calibration file {path} not found") from ex
    except json.JSONDecodeError as ex:
        raise FixtureError(f"Calibration file {path} is not valid JSON: {ex}") from ex
    return Calibration.from_json(data)


def save_calibration(calibration: Calibration, path: str | Path | None = None) -> Path:
    path = Path(path) if path is not None else FIXTURE_PATH
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(calibration.to_json(), stream, indent=2)
        stream.write("\n")
    _LOGGER.info("Saved calibration to %s", path)
    return path


def calibrate_moment_constant(  # pylint: disable=invalid-name
    J: int,
    n_samples: int = 1_000_000,
    seed: int = DEFAULT_SEED,
    margin: float = _ENVELOPE_MARGIN,
    grid: Sequence[float] = MOMENT_GRID,
    threads: int = 1,
) -> float:
    """margin * max over M of estimate / envelope on the k = 1 row, equal b."""
    b = (1.0 / math.sqrt(J),) * J
    ratios = [
        moment_estimate(1, M, b, n_samples, seed, threads).mean / moment_envelope(1, M, J)
        for M in grid
    ]
    return margin * max(ratios)


def calibrate(
    J_values: Sequence[int] = (1, 2),  # pylint: disable=invalid-name
    n_samples: int = 1_000_000,
    seed: int = DEFAULT_SEED,
    margin: float = _ENVELOPE_MARGIN,
    threads: int = 1,
) -> Calibration:
    """Fresh envelope constants."""
    moment = {
        J: calibrate_moment_constant(J, n_samples, seed, margin, threads=threads)
        for J in J_values
    }
    worst, _ = _log_integral_worst(LOG_INTEGRAL_EPS, LOG_INTEGRAL_RADIUS, LOG_INTEGRAL_GRID)
    calibration = Calibration(moment, margin * worst, margin)
    _LOGGER.info("Calibrated envelope constants: %s", calibration.to_json())
    return calibration
