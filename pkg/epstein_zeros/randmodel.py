"""Random Euler product model L_j(sigma : X) and its moments."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import logging
import math
from typing import Any, Final, Sequence

import numpy as np
from scipy import special as sps
from scipy import stats

from epstein_zeros.constants import (
    DEFAULT_PRIME_CUTOFF,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    EULER_LOG_TERMS,
)
from epstein_zeros.epstein import CombinationSpec
from epstein_zeros.exceptions import InvalidInputError
from epstein_zeros.quadforms import ClassGroup, classify_primes
from epstein_zeros.streams import KeyedStream
from epstein_zeros.util import is_very_verbose, pairwise_sum

_LOGGER = logging.getLogger(__name__)

# Elements per sampling batch (rows x primes).
_BATCH_ELEMENTS: Final = 1 << 21
_SPLIT: Final = 1
_INERT: Final = -1


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with standard error"""

    mean: float
    stderr: float
    n_samples: int
    P: int  # pylint: disable=invalid-name
    tail_scale: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "n": self.n_samples,
            "P": self.P,
            "tail_scale": self.tail_scale,
        }


@dataclass(frozen=True)
class ProbeEstimate:
    """Monte Carlo estimate of a complex expectation"""

    value: complex
    stderr: float
    n_samples: int


class ModelInstance:  # pylint: disable=too-many-instance-attributes
    """Truncated random Euler products for the characters of a combination"""

    def __init__(
        self,
        spec: CombinationSpec,
        group: ClassGroup,
        P: int = DEFAULT_PRIME_CUTOFF,  # pylint: disable=invalid-name
        seed: int = DEFAULT_SEED,
        conjugated: bool = False,
    ) -> None:
        if spec.J != group.J:
            raise InvalidInputError(
                f"Combination has J={spec.J}, class group D={group.D} has J={group.J}"
            )
        self.spec = spec
        self.group = group
        self.P = int(P)  # pylint: disable=invalid-name
        self.seed = int(seed)
        self.conjugated = conjugated
        self.stream = KeyedStream(self.seed, f"X/{group.D}")

        table = classify_primes(group, self.P)
        keep = (table.kinds != _INERT) | (table.primes * table.primes <= self.P)
        self.primes = table.primes[keep]
        self.kinds = table.kinds[keep]
        classes = table.classes[keep]
        if conjugated:
            inverse = np.array([group.inverse(k) for k in range(group.h)])
            classes = np.where(classes >= 0, inverse[np.maximum(classes, 0)], -1)
        self.classes = classes
        # All rational primes up to P get a phase so swapping labels keeps streams.
        self._all_primes = table.primes
        self._positions = np.searchsorted(table.primes, self.primes)

        h = group.h
        inverse = np.array([group.inverse(k) for k in range(h)])
        safe = np.maximum(classes, 0)
        alpha = np.zeros((spec.J, len(self.primes)), dtype=complex)
        beta = np.zeros_like(alpha)
        for row, j in enumerate(spec.characters):
            chars = group.chars[j]
            alpha[row] = np.where(classes >= 0, chars[safe], 0.0)
            beta[row] = np.where(self.kinds == _SPLIT, chars[inverse[safe]], 0.0)
        self.alpha = alpha
        self.beta = beta
        self.inert = self.kinds == _INERT
        self.log_primes = np.log(self.primes.astype(np.float64))
        _LOGGER.debug(
            "Model D=%d P=%d: %d prime factors (%d inert)",
            group.D,
            self.P,
            len(self.primes),
            int(np.sum(self.inert)),
        )

    @property
    def n_phases(self) -> int:
        return len(self._all_primes)

    def phases(self, index: int) -> np.ndarray:
        """X(p) for the included primes in sample index."""
        angles = 2.0 * math.pi * self.stream.uniforms(index, self.n_phases)
        return np.exp(1j * angles[self._positions])

    def log_L_batch(  # pylint: disable=invalid-name
        self, sigma: float, start: int, count: int
    ) -> np.ndarray:
        """log L_j(sigma : X_i) for samples start..start+count, shape (count, J)."""
        weights = np.exp(-sigma * self.log_primes)
        z = np.stack([self.phases(index) for index in range(start, start + count)])
        z = z * weights
        inert_part = -np.log1p(-(z * z))
        result = np.empty((count, self.spec.J), dtype=complex)
        for row in range(self.spec.J):
            local = -np.log1p(-self.alpha[row] * z) - np.log1p(-self.beta[row] * z)
            local = np.where(self.inert, inert_part, local)
            result[:, row] = pairwise_sum(local)
        return result

    def swapped(self) -> ModelInstance:
        """Same model with every class relabelled by its inverse."""
        return ModelInstance(self.spec, self.group, self.P, self.seed, not self.conjugated)

    def tail_scale(self, sigma: float) -> float:
        """Standard deviation scale of the omitted primes p > P."""
        exponent = (2.0 * sigma - 1.0) * math.log(self.P)
        return math.sqrt(2.0 * self.spec.J * float(sps.exp1(exponent)))

    def batch_size(self) -> int:
        return max(1, _BATCH_ELEMENTS // max(1, len(self.primes)))


@lru_cache(maxsize=16)
def build_instance(
    spec: CombinationSpec,
    group: ClassGroup,
    P: int = DEFAULT_PRIME_CUTOFF,  # pylint: disable=invalid-name
    seed: int = DEFAULT_SEED,
) -> ModelInstance:
    return ModelInstance(spec, group, P, seed)


def _check_sigma(sigma: float) -> None:
    if sigma <= 0.5:
        raise InvalidInputError(f"sigma must exceed 1/2, got {sigma}")


def sample_log_L(model: ModelInstance, sigma: float, index: int) -> np.ndarray:  # pylint: disable=invalid-name
    """Vector log L_j(sigma : X) of one sample."""
    _check_sigma(sigma)
    return model.log_L_batch(sigma, index, 1)[0]


def _combine(model: ModelInstance, logs: np.ndarray) -> np.ndarray:
    return pairwise_sum(np.exp(logs) * np.asarray(model.spec.b, dtype=complex))


def sample_F(model: ModelInstance, sigma: float, index: int) -> complex:  # pylint: disable=invalid-name
    """F_J(sigma : X) = sum_j b_j L_j(sigma : X) for sample index."""
    return complex(_combine(model, sample_log_L(model, sigma, index)[np.newaxis, :])[0])


def _batched(
    model: ModelInstance, sigma: float, n_samples: int, threads: int, start: int = 0
) -> np.ndarray:
    _check_sigma(sigma)
    size = model.batch_size()
    starts = list(range(start, start + n_samples, size))

    def run(first: int) -> np.ndarray:
        count = min(size, start + n_samples - first)
        return model.log_L_batch(sigma, first, count)

    if threads <= 1:
        parts = [run(first) for first in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    return np.concatenate(parts, axis=0)


def sample_logs(
    model: ModelInstance, sigma: float, n_samples: int, threads: int = 1, start: int = 0
) -> np.ndarray:
    """Matrix of log L_j samples, rows ordered by sample index."""
    return _batched(model, sigma, n_samples, threads, start)


def log_abs_F_samples(  # pylint: disable=invalid-name
    model: ModelInstance, sigma: float, n_samples: int, threads: int = 1
) -> np.ndarray:
    values = _combine(model, sample_logs(model, sigma, n_samples, threads))
    return np.log(np.abs(values))


def mc_estimate(
    model: ModelInstance,
    sigma: float,
    n_samples: int = DEFAULT_SAMPLES,
    threads: int = 1,
) -> McEstimate:
    """E[log |F_J(sigma : X)|] by plain Monte Carlo."""
    samples = log_abs_F_samples(model, sigma, n_samples, threads)
    mean = float(pairwise_sum(samples) / n_samples)
    stderr = float(np.std(samples, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    _LOGGER.debug("MC sigma=%g N=%d mean=%g stderr=%g", sigma, n_samples, mean, stderr)
    return McEstimate(mean, stderr, n_samples, model.P, model.tail_scale(sigma))


def a_coeff(model: ModelInstance, j: int, p: int) -> float:
    """a_j(p) = sum over prime ideals of norm p of chi_j."""
    if p > model.P:
        raise InvalidInputError(f"p={p} exceeds the cutoff P={model.P}")
    position = int(np.searchsorted(model.primes, p))
    if position >= len(model.primes) or model.primes[position] != p:
        return 0.0
    kind = int(model.kinds[position])
    if kind == _INERT:
        return 0.0
    value = model.group.chars[j, int(model.classes[position])]
    return float(2.0 * value.real if kind == _SPLIT else value.real)


def _coefficient_vector(model: ModelInstance, j: int) -> tuple[np.ndarray, np.ndarray]:
    """(primes, a_j(p)) over rational primes with a degree one prime ideal."""
    mask = ~model.inert
    chars = model.group.chars[j]
    classes = model.classes[mask]
    factor = np.where(model.kinds[mask] == _SPLIT, 2.0, 1.0)
    return model.primes[mask], factor * chars[classes].real


def mean_square(model: ModelInstance, j: int, l: int) -> float:
    """Average of a_j(p) a_l(p) over primes (split primes equidistribute)."""
    group = model.group
    a_j = 2.0 * group.chars[j].real
    a_l = 2.0 * group.chars[l].real
    return float(np.sum(a_j * a_l) / (2.0 * group.h))


def soc_sum(
    model: ModelInstance, j: int, l: int, sigma: float, tail: bool = False
) -> float:
    """sum_{p <= P} a_j(p) a_l(p) / p^(2 sigma), optionally with the p > P tail."""
    _check_sigma(sigma)
    primes, first = _coefficient_vector(model, j)
    _, second = _coefficient_vector(model, l)
    logs = np.log(primes.astype(np.float64))
    terms = first * second * np.exp(-2.0 * sigma * logs)
    # symmetric in (j, l): the product is formed before summation
    total = float(pairwise_sum(terms))
    if tail:
        exponent = (2.0 * sigma - 1.0) * math.log(model.P)
        total += mean_square(model, j, l) * float(sps.exp1(exponent))
    return total


def soc_slope(
    model: ModelInstance,
    j: int,
    l: int,
    sigmas: Sequence[float] = (0.51, 0.505, 0.502, 0.501),
    tail: bool = True,
) -> tuple[float, float]:
    """Slope and intercept of soc_sum against log(1/(2 sigma - 1))."""
    x = np.array([math.log(1.0 / (2.0 * s - 1.0)) for s in sigmas])
    y = np.array([soc_sum(model, j, l, s, tail) for s in sigmas])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def covariance_matrix(model: ModelInstance, sigma: float, tail: bool = False) -> np.ndarray:
    """Matrix of soc sums over the characters of the combination."""
    chars = model.spec.characters
    size = len(chars)
    matrix = np.zeros((size, size))
    for row in range(size):
        for col in range(row, size):
            value = soc_sum(model, chars[row], chars[col], sigma, tail)
            matrix[row, col] = matrix[col, row] = value
    return matrix


def _euler_log(model: ModelInstance, position: int, row: int, x: np.ndarray, sigma: float) -> np.ndarray:
    """g_j(p, sigma : x) truncated after EULER_LOG_TERMS terms."""
    p = float(model.primes[position])
    kind = int(model.kinds[position])
    alpha = model.alpha[row, position]
    beta = model.beta[row, position]
    total = np.zeros_like(x, dtype=complex)
    for n in range(1, EULER_LOG_TERMS + 1):
        if kind == _INERT:
            if n % 2:
                continue
            coefficient = 2.0 / n
        else:
            coefficient = (alpha**n + beta**n) / n
        total += coefficient * x**n * p ** (-n * sigma)
    return total


def A_kl(  # pylint: disable=invalid-name,too-many-arguments
    model: ModelInstance,
    p: int,
    sigma: float,
    k: Sequence[int],
    l: Sequence[int],
    grid: int | None = None,
) -> complex:
    """E[prod_j g_j(p,sigma:X)^k_j g_j(p,sigma:conj X)^l_j] over X on the circle."""
    if len(k) != model.spec.J or len(l) != model.spec.J:
        raise InvalidInputError(f"Index vectors must have length J={model.spec.J}")
    position = int(np.searchsorted(model.primes, p))
    if position >= len(model.primes) or model.primes[position] != p:
        raise InvalidInputError(f"{p} is not a prime factor of the model")
    order = sum(k) + sum(l)
    nodes = grid or 2 * EULER_LOG_TERMS * max(order, 1) + 1
    angles = 2.0 * math.pi * np.arange(nodes) / nodes
    x = np.exp(1j * angles)
    product = np.ones(nodes, dtype=complex)
    for row in range(model.spec.J):
        if k[row]:
            product *= _euler_log(model, position, row, x, sigma) ** k[row]
        if l[row]:
            product *= _euler_log(model, position, row, np.conj(x), sigma) ** l[row]
    return complex(np.mean(product))


def char_function_probe(  # pylint: disable=too-many-arguments
    model: ModelInstance,
    sigma: float,
    x: Sequence[float],
    y: Sequence[float],
    n_samples: int = DEFAULT_SAMPLES,
    threads: int = 1,
) -> ProbeEstimate:
    """E exp(2 pi i sum_j (x_j Re log L_j + y_j Im log L_j))."""
    if n_samples < 1000:
        raise InvalidInputError(f"Probe needs at least 1000 samples, got {n_samples}")
    logs = sample_logs(model, sigma, n_samples, threads)
    phase = logs.real @ np.asarray(x, dtype=float) + logs.imag @ np.asarray(y, dtype=float)
    values = np.exp(2j * math.pi * phase)
    mean = complex(pairwise_sum(values) / n_samples)
    spread = math.sqrt(float(np.var(values.real, ddof=1) + np.var(values.imag, ddof=1)))
    if is_very_verbose():
        _LOGGER.debug("Probe x=%s y=%s -> %s", x, y, mean)
    return ProbeEstimate(mean, spread / math.sqrt(n_samples), n_samples)


def gaussian_prediction(
    model: ModelInstance, sigma: float, x: Sequence[float], y: Sequence[float]
) -> float:
    """Characteristic function of the Gaussian with the soc covariance."""
    matrix = covariance_matrix(model, sigma)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return math.exp(-(math.pi**2) * float(x @ matrix @ x + y @ matrix @ y))


def relabel_statistic(
    model: ModelInstance, sigma: float, n_samples: int, threads: int = 1
) -> tuple[float, float]:
    """Two-sample KS statistic and p-value of log|F| versus conjugate relabelling."""
    first = log_abs_F_samples(model, sigma, n_samples, threads)
    second = log_abs_F_samples(model.swapped(), sigma, n_samples, threads)
    result = stats.ks_2samp(first, second)
    return float(result.statistic), float(result.pvalue)


def ks_critical(n_first: int, n_second: int, alpha: float = 0.01) -> float:
    """Asymptotic critical value of the two-sample KS statistic."""
    factor = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    return factor * math.sqrt((n_first + n_second) / (n_first * n_second))
