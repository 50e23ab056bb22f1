"""Zero counting and localization for F_J by the argument principle."""
from __future__ import annotations

import cmath
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
import logging
import math
import threading
from typing import Any, Callable, Final, Sequence

import numpy as np
from scipy import optimize

from epstein_zeros.asymptotics import MainTermParams, zero_density_main_term
from epstein_zeros.constants import (
    BOUNDARY_ZERO_FACTOR,
    DEFAULT_PRIME_CUTOFF,
    DEFAULT_REFINE_LIMIT,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    JITTER_RETRIES,
    NEWTON_BOX,
    NEWTON_TOL,
    SIGMA_JITTER,
    T_JITTER,
    WINDING_INTEGRALITY,
    ZERO_RESIDUAL,
)
from epstein_zeros.epstein import (
    CombinationSpec,
    eval_F,
    evaluate_many,
    ideal_coefficients,
)
from epstein_zeros.exceptions import (
    BoundaryZeroError,
    InvalidInputError,
    NoConvergenceError,
)
from epstein_zeros.quadforms import ClassGroup
from epstein_zeros.randmodel import build_instance, mc_estimate
from epstein_zeros.special import DEFAULT_TOLERANCE, Tolerance, mp_context
from epstein_zeros.util import is_very_verbose, loglog, sigma_T

_LOGGER = logging.getLogger(__name__)

_INITIAL_STEP: Final = 0.1
_MAX_INCREMENT: Final = math.pi / 2
_NEWTON_STEPS: Final = 60
_DERIVATIVE_STEP: Final = 1e-6
_MIN_BOX: Final = 1e-8
# Cut positions as fractions of the side, tried in order.
_CUT_OFFSETS: Final = (0.0, 0.0713, -0.0527, 0.1129, -0.0931, 0.1571)
_SIGMA_FREE_TERMS: Final = 1000
_SIGMA_FREE_MARGIN: Final = 0.05
_SIGMA_FREE_MAX: Final = 40.0
_DH_BOX_HEIGHT: Final = 10.0
_DH_OFFSET: Final = 1e-6
_GAUSS_NODES: Final = 16
_PANEL_LENGTH: Final = 0.5


@dataclass(frozen=True)
class Rectangle:
    """Closed box [sigma_min, sigma_max] x [t_min, t_max]"""

    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self) -> None:
        if not self.sigma_min < self.sigma_max:
            raise InvalidInputError(
                f"Empty sigma range [{self.sigma_min}, {self.sigma_max}]"
            )
        if not self.t_min < self.t_max:
            raise InvalidInputError(f"Empty t range [{self.t_min}, {self.t_max}]")

    @property
    def width(self) -> float:
        return self.sigma_max - self.sigma_min

    @property
    def height(self) -> float:
        return self.t_max - self.t_min

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(
            (self.sigma_min + self.sigma_max) / 2, (self.t_min + self.t_max) / 2
        )

    def corners(self) -> tuple[complex, complex, complex, complex]:
        """Counterclockwise from the lower left corner."""
        return (
            complex(self.sigma_min, self.t_min),
            complex(self.sigma_max, self.t_min),
            complex(self.sigma_max, self.t_max),
            complex(self.sigma_min, self.t_max),
        )

    def edges(self) -> list[tuple[complex, complex]]:
        corners = self.corners()
        return [(corners[i], corners[(i + 1) % 4]) for i in range(4)]

    def contains(self, s: complex, slack: float = 0.0) -> bool:
        return (
            self.sigma_min - slack <= s.real <= self.sigma_max + slack
            and self.t_min - slack <= s.imag <= self.t_max + slack
        )

    def quadrisect(self, offset: float = 0.0) -> list[Rectangle]:
        sigma_cut = self.sigma_min + self.width * (0.5 + offset)
        t_cut = self.t_min + self.height * (0.5 - offset)
        return [
            Rectangle(self.sigma_min, sigma_cut, self.t_min, t_cut),
            Rectangle(sigma_cut, self.sigma_max, self.t_min, t_cut),
            Rectangle(self.sigma_min, sigma_cut, t_cut, self.t_max),
            Rectangle(sigma_cut, self.sigma_max, t_cut, self.t_max),
        ]

    def shifted(self, sigma: float = 0.0, t: float = 0.0) -> Rectangle:
        """Left edge moved by sigma, whole box moved by t."""
        return Rectangle(
            self.sigma_min + sigma, self.sigma_max, self.t_min + t, self.t_max + t
        )

    def to_json(self) -> dict[str, float]:
        return {
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "t_min": self.t_min,
            "t_max": self.t_max,
        }


def _divisor_counts(limit: int) -> np.ndarray:
    counts = np.zeros(limit + 1, dtype=np.int64)
    for i in range(1, limit + 1):
        counts[i::i] += 1
    return counts[1:]


def sigma_free(
    spec: CombinationSpec, group: ClassGroup, n_max: int = _SIGMA_FREE_TERMS
) -> float:
    """Abscissa right of which F_J has no zeros.

    F_J = sum c_n n^-s; with n0 the first index where c_n != 0 and
    |c_n| <= sum |b_j| d(n) for the tail, |c_n0| n0^-sigma dominates the rest.
    """
    coefficients = np.zeros(n_max, dtype=complex)
    for value, j in zip(spec.b, spec.characters):
        coefficients += value * ideal_coefficients(group, j, n_max)
    nonzero = np.flatnonzero(np.abs(coefficients) > 1e-12)
    if len(nonzero) == 0:
        raise InvalidInputError(f"First {n_max} coefficients of {spec.label} vanish")
    first = int(nonzero[0]) + 1
    lead = abs(coefficients[first - 1])
    bound = sum(abs(value) for value in spec.b)
    indices = np.arange(1, n_max + 1, dtype=float)
    sizes = np.abs(coefficients)
    divisors = _divisor_counts(n_max).astype(float)
    ctx = mp_context(30)

    def margin(sigma: float) -> float:
        ratios = (first / indices) ** sigma
        head = float(np.sum(sizes[first:] * ratios[first:]))
        partial = ctx.fsum(ctx.mpf(d) * ctx.mpf(n) ** (-sigma) for d, n in zip(divisors, indices))
        tail = float(max(ctx.zeta(sigma) ** 2 - partial, 0)) * first**sigma
        return lead - head - bound * tail

    root = optimize.brentq(margin, 1.0 + 1e-6, _SIGMA_FREE_MAX, xtol=1e-6)
    _LOGGER.debug("sigma_free of %s: %g (n0=%d)", spec.label, root, first)
    return float(root) + _SIGMA_FREE_MARGIN


class ScanTarget:
    """Analytic function to be scanned, with memoized evaluations"""

    def __init__(  # pylint: disable=too-many-arguments
        self,
        func: Callable[[complex], complex],
        label: str = "f",
        scale: float = 1.0,
        pole: complex | None = None,
        free_abscissa: float | None = None,
        spec: CombinationSpec | None = None,
        group: ClassGroup | None = None,
    ) -> None:
        self._func = func
        self.label = label
        self.scale = scale
        self.pole = pole
        self._free_abscissa = free_abscissa
        self.spec = spec
        self.group = group
        self.evaluations = 0
        self._cache: dict[complex, complex] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_spec(
        cls,
        spec: CombinationSpec,
        group: ClassGroup,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> ScanTarget:
        return cls(
            lambda s: eval_F(spec, group, s, tol),
            label=spec.label or "F_J",
            scale=sum(abs(value) for value in spec.b),
            pole=1.0 + 0.0j if spec.has_pole else None,
            spec=spec,
            group=group,
        )

    @classmethod
    def from_callable(
        cls,
        func: Callable[[complex], complex],
        label: str = "f",
        scale: float = 1.0,
        free_abscissa: float | None = None,
    ) -> ScanTarget:
        return cls(func, label=label, scale=scale, free_abscissa=free_abscissa)

    @cached_property
    def free_abscissa(self) -> float:
        if self._free_abscissa is not None:
            return self._free_abscissa
        if self.spec is None or self.group is None:
            raise InvalidInputError(f"{self.label} has no known zero-free half plane")
        return sigma_free(self.spec, self.group)

    def scaled(self, factor: complex) -> ScanTarget:
        """Target for factor * f."""
        return ScanTarget(
            lambda s: factor * self._func(s),
            label=f"{factor}*{self.label}",
            scale=abs(factor) * self.scale,
            pole=self.pole,
            free_abscissa=self._free_abscissa,
            spec=self.spec,
            group=self.group,
        )

    def __call__(self, s: complex) -> complex:
        s = complex(s)
        with self._lock:
            if s in self._cache:
                return self._cache[s]
        value = complex(self._func(s))
        with self._lock:
            self._cache[s] = value
            self.evaluations += 1
        if is_very_verbose():
            _LOGGER.debug("%s(%s) = %s", self.label, s, value)
        return value

    def derivative(self, s: complex, step: float = _DERIVATIVE_STEP) -> complex:
        return (self._func(s + step) - self._func(s - step)) / (2.0 * step)

    def check_rectangle(self, rect: Rectangle) -> None:
        if self.pole is not None and rect.contains(self.pole):
            raise InvalidInputError(f"{rect} contains the pole of {self.label} at {self.pole}")

    def __repr__(self) -> str:
        return f"ScanTarget({self.label}, evaluations={self.evaluations})"


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    residual: float

    def to_json(self) -> dict[str, float]:
        return {"re": self.location.real, "im": self.location.imag, "residual": self.residual}


@dataclass
class ZeroScanReport:
    """Zeros of a target inside a rectangle"""

    rect: Rectangle
    winding: int
    zeros: list[ZeroRecord] = field(default_factory=list)
    min_boundary_modulus: float = math.inf
    evaluations: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "rect": self.rect.to_json(),
            "winding": self.winding,
            "zeros": [zero.to_json() for zero in self.zeros],
            "min_boundary_modulus": self.min_boundary_modulus,
            "evaluations": self.evaluations,
        }

    def to_rows(self) -> list[dict[str, float]]:
        return [zero.to_json() for zero in self.zeros]


def _segment_phase(
    target: ScanTarget, start: complex, end: complex, refine_limit: int
) -> tuple[float, float]:
    """Continuous change of arg f from start to end and the smallest |f| seen."""
    pieces = max(4, math.ceil(abs(end - start) / _INITIAL_STEP))
    threshold = BOUNDARY_ZERO_FACTOR * target.scale

    def point(x: float) -> complex:
        # endpoints exactly, so corners are shared between edges
        if x == 0.0:
            return start
        if x == 1.0:
            return end
        return start + x * (end - start)

    smallest = math.inf

    def evaluate(x: float) -> complex:
        nonlocal smallest
        where = point(x)
        value = target(where)
        modulus = abs(value)
        smallest = min(smallest, modulus)
        if modulus < threshold:
            raise BoundaryZeroError(f"{target.label} vanishes on the contour", where, modulus)
        return value

    grid = [i / pieces for i in range(pieces + 1)]
    values = [evaluate(x) for x in grid]
    stack = [
        (grid[i], values[i], grid[i + 1], values[i + 1], 0) for i in reversed(range(pieces))
    ]
    total = 0.0
    while stack:
        a, f_a, b, f_b, depth = stack.pop()
        increment = cmath.phase(f_b / f_a)
        if abs(increment) < _MAX_INCREMENT:
            total += increment
            continue
        middle = (a + b) / 2
        if depth >= refine_limit:
            raise BoundaryZeroError(
                f"Phase of {target.label} not resolved after {refine_limit} bisections",
                point(middle),
                min(abs(f_a), abs(f_b)),
            )
        f_m = evaluate(middle)
        stack.append((middle, f_m, b, f_b, depth + 1))
        stack.append((a, f_a, middle, f_m, depth + 1))
    return total, smallest


def _map(func: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _winding(
    target: ScanTarget, rect: Rectangle, refine_limit: int, threads: int
) -> tuple[int, float]:
    target.check_rectangle(rect)
    results = _map(
        lambda edge: _segment_phase(target, edge[0], edge[1], refine_limit),
        rect.edges(),
        threads,
    )
    turns = sum(phase for phase, _ in results) / (2.0 * math.pi)
    winding = round(turns)
    if abs(turns - winding) > WINDING_INTEGRALITY:
        raise NoConvergenceError(f"Winding number {turns} around {rect} is not an integer")
    if winding < 0:
        raise NoConvergenceError(f"Negative winding {winding} around {rect}: pole inside?")
    smallest = min(modulus for _, modulus in results)
    _LOGGER.debug("Winding %d around %s (min |f| %.3g)", winding, rect, smallest)
    return winding, smallest


def winding_number(
    target: ScanTarget,
    rect: Rectangle,
    refine_limit: int = DEFAULT_REFINE_LIMIT,
    threads: int = 1,
) -> int:
    """Number of zeros (with multiplicity) inside rect."""
    return _winding(target, rect, refine_limit, threads)[0]


def _crossings(values: np.ndarray) -> int:
    """Signed crossings of the positive real axis by a closed polygon."""
    winding = 0
    x, y = values.real, values.imag
    for i in range(1, len(values)):
        above, was_above = y[i] >= 0, y[i - 1] >= 0
        if above == was_above:
            continue
        if x[i] > 0 and x[i - 1] > 0:
            winding += 1 if above else -1
        elif not (x[i] <= 0 and x[i - 1] <= 0):
            cross = (x[i - 1] * y[i] - x[i] * y[i - 1]) / (y[i] - y[i - 1])
            if cross > 0:
                winding += 1 if above else -1
    return winding


def grid_count(
    target: ScanTarget,
    rect: Rectangle,
    cells: tuple[int, int] = (2, 4),
    density: int = 40,
) -> int:
    """Zero count from fixed boundary grids of a cell subdivision (oracle)."""
    target.check_rectangle(rect)
    sigmas = np.linspace(rect.sigma_min, rect.sigma_max, cells[0] + 1)
    heights = np.linspace(rect.t_min, rect.t_max, cells[1] + 1)
    total = 0
    for i in range(cells[0]):
        for j in range(cells[1]):
            cell = Rectangle(sigmas[i], sigmas[i + 1], heights[j], heights[j + 1])
            path = []
            for start, end in cell.edges():
                count = max(2, math.ceil(abs(end - start) * density))
                path.extend(start + (end - start) * k / count for k in range(count))
            path.append(path[0])
            total += _crossings(np.array([target(s) for s in path]))
    return total


def _newton(target: ScanTarget, start: complex, box: Rectangle) -> complex | None:
    s = start
    for _ in range(_NEWTON_STEPS):
        slope = target.derivative(s)
        if slope == 0:
            return None
        step = target(s) / slope
        s -= step
        if not box.contains(s, slack=box.diameter):
            return None
        if abs(step) <= NEWTON_TOL * max(1.0, abs(s)):
            return s
    return None


def _split(
    target: ScanTarget, rect: Rectangle, count: int, refine_limit: int, threads: int
) -> list[tuple[Rectangle, int]]:
    failure: Exception | None = None
    for offset in _CUT_OFFSETS:
        children = rect.quadrisect(offset)
        try:
            counts = _map(
                lambda child: _winding(target, child, refine_limit, 1)[0], children, threads
            )
        except BoundaryZeroError as ex:
            failure = ex
            _LOGGER.debug("Cut of %s at offset %g hits a zero, jittering", rect, offset)
            continue
        if sum(counts) == count:
            return list(zip(children, counts))
        failure = NoConvergenceError(f"Children of {rect} count {sum(counts)}, parent {count}")
    assert failure is not None
    raise failure


def _locate(  # pylint: disable=too-many-arguments
    target: ScanTarget,
    rect: Rectangle,
    count: int,
    found: list[ZeroRecord],
    refine_limit: int,
    threads: int,
) -> None:
    if count == 0:
        return
    if rect.diameter <= _MIN_BOX:
        center = rect.center
        found.extend(ZeroRecord(center, abs(target(center))) for _ in range(count))
        return
    if count == 1 and rect.diameter <= NEWTON_BOX:
        root = _newton(target, rect.center, rect)
        if root is not None and rect.contains(root, slack=1e-12):
            residual = abs(target(root))
            if residual <= ZERO_RESIDUAL * target.scale:
                found.append(ZeroRecord(root, residual))
                return
    for child, child_count in _split(target, rect, count, refine_limit, threads):
        _locate(target, child, child_count, found, refine_limit, threads)


def locate_zeros(
    target: ScanTarget,
    rect: Rectangle,
    refine_limit: int = DEFAULT_REFINE_LIMIT,
    threads: int = 1,
) -> ZeroScanReport:
    """All zeros inside rect, found by quadrisection and Newton refinement."""
    winding, smallest = _winding(target, rect, refine_limit, threads)
    found: list[ZeroRecord] = []
    _locate(target, rect, winding, found, refine_limit, threads)
    found.sort(key=lambda zero: (zero.location.imag, zero.location.real))
    _LOGGER.debug("Located %d zeros of %s in %s", len(found), target.label, rect)
    return ZeroScanReport(rect, winding, found, smallest, target.evaluations)


@dataclass
class StripCount:  # pylint: disable=too-many-instance-attributes
    """Zero count in [sigma0, sigma_free] x [T1, T2]"""

    count: int
    sigma_T: float  # pylint: disable=invalid-name
    sigma_free: float
    t_min: float
    t_max: float
    jitter_t: float = 0.0
    jitter_sigma: float = 0.0
    report: ZeroScanReport | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "sigma_T": self.sigma_T,
            "sigma_free": self.sigma_free,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "jitter_t": self.jitter_t,
            "jitter_sigma": self.jitter_sigma,
            "report": self.report.to_json() if self.report else None,
        }


def _jitters() -> list[tuple[float, float]]:
    """(t, sigma) shifts tried in turn after boundary collisions."""
    shifts = [(0.0, 0.0)]
    for attempt in range(1, JITTER_RETRIES + 1):
        sign = 1.0 if attempt % 2 else -1.0
        shifts.append((sign * T_JITTER * attempt, SIGMA_JITTER * attempt))
    return shifts


def _with_jitter(run: Callable[[float, float], Any], what: str) -> tuple[Any, float, float]:
    failure: BoundaryZeroError | None = None
    for shift_t, shift_sigma in _jitters():
        try:
            return run(shift_t, shift_sigma), shift_t, shift_sigma
        except BoundaryZeroError as ex:
            failure = ex
            _LOGGER.warning("%s: %s, retrying with jitter", what, ex)
    assert failure is not None
    raise failure


def count_in_strip(  # pylint: disable=too-many-arguments
    target: ScanTarget,
    sigma0: float,
    T1: float,  # pylint: disable=invalid-name
    T2: float,  # pylint: disable=invalid-name
    locate: bool = False,
    refine_limit: int = DEFAULT_REFINE_LIMIT,
    threads: int = 1,
) -> StripCount:
    """Zeros with Re s > sigma0 and T1 < Im s < T2."""
    right = target.free_abscissa
    if sigma0 >= right:
        return StripCount(0, sigma0, right, T1, T2)

    def run(shift_t: float, shift_sigma: float) -> tuple[int, ZeroScanReport | None]:
        rect = Rectangle(sigma0 + shift_sigma, right, T1 + shift_t, T2 + shift_t)
        if locate:
            report = locate_zeros(target, rect, refine_limit, threads)
            return report.winding, report
        return winding_number(target, rect, refine_limit, threads), None

    (count, report), shift_t, shift_sigma = _with_jitter(run, f"Strip count of {target.label}")
    return StripCount(count, sigma0, right, T1, T2, shift_t, shift_sigma, report)


def count_above(  # pylint: disable=too-many-arguments
    target: ScanTarget,
    theta: float,
    T: float,  # pylint: disable=invalid-name
    locate: bool = False,
    refine_limit: int = DEFAULT_REFINE_LIMIT,
    threads: int = 1,
) -> StripCount:
    """N(sigma_T(theta) : T), zeros with Re s > sigma_T and T < Im s < 2T."""
    if T < 10:
        raise InvalidInputError(f"T must be at least 10, got {T}")
    return count_in_strip(target, sigma_T(theta, T), T, 2 * T, locate, refine_limit, threads)


def _gauss_nodes(lower: float, upper: float, n_nodes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [lower, upper]."""
    if n_nodes is None:
        panels = max(1, math.ceil((upper - lower) / _PANEL_LENGTH))
    else:
        panels = max(1, math.ceil(n_nodes / _GAUSS_NODES))
    base, weights = np.polynomial.legendre.leggauss(_GAUSS_NODES)
    edges = np.linspace(lower, upper, panels + 1)
    half = np.diff(edges) / 2
    middle = (edges[1:] + edges[:-1]) / 2
    nodes = (middle[:, None] + half[:, None] * base[None, :]).ravel()
    return nodes, (half[:, None] * weights[None, :]).ravel()


def _log_modulus_integral(
    target: ScanTarget, sigma: float, T1: float, T2: float  # pylint: disable=invalid-name
) -> float:
    nodes, weights = _gauss_nodes(T1, T2)
    values = np.array([target(complex(sigma, t)) for t in nodes])
    threshold = BOUNDARY_ZERO_FACTOR * target.scale
    smallest = int(np.argmin(np.abs(values)))
    if abs(values[smallest]) < threshold:
        raise BoundaryZeroError(
            f"{target.label} vanishes on Re s = {sigma}",
            complex(sigma, nodes[smallest]),
            abs(values[smallest]),
        )
    return float(np.dot(weights, np.log(np.abs(values))))


def _argument_integral(
    target: ScanTarget,
    start_arg: float,
    sigma0: float,
    sigma1: float,
    t: float,
    refine_limit: int,
) -> float:
    """int_{sigma0}^{sigma1} arg f(sigma + it) d sigma, arg continued from sigma1 + it."""
    nodes, weights = _gauss_nodes(sigma0, sigma1)
    order = np.argsort(-nodes)
    args = np.zeros(len(nodes))
    current, where = start_arg, complex(sigma1, t)
    for index in order:
        point = complex(nodes[index], t)
        change, _ = _segment_phase(target, where, point, refine_limit)
        current += change
        where = point
        args[index] = current
    return float(np.dot(weights, args))


@dataclass(frozen=True)
class LittlewoodReport:  # pylint: disable=too-many-instance-attributes
    """Both sides of 2 pi sum (beta - sigma0) = contour integral of log f"""

    sigma0: float
    sigma1: float
    t_min: float
    t_max: float
    zero_side: float
    contour_side: float
    residual: float
    relative: float
    zeros: int
    jitter_t: float = 0.0
    jitter_sigma: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "sigma0": self.sigma0,
            "sigma1": self.sigma1,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "zero_side": self.zero_side,
            "contour_side": self.contour_side,
            "residual": self.residual,
            "relative": self.relative,
            "zeros": self.zeros,
            "jitter_t": self.jitter_t,
            "jitter_sigma": self.jitter_sigma,
        }


def littlewood_check(  # pylint: disable=too-many-arguments,too-many-locals
    target: ScanTarget,
    sigma0: float,
    T1: float,  # pylint: disable=invalid-name
    T2: float,  # pylint: disable=invalid-name
    sigma1: float | None = None,
    refine_limit: int = DEFAULT_REFINE_LIMIT,
    threads: int = 1,
) -> LittlewoodReport:
    """Littlewood's lemma on [sigma0, sigma1] x [T1, T2], both sides numerically."""
    right = target.free_abscissa if sigma1 is None else sigma1

    def run(shift_t: float, shift_sigma: float) -> tuple[float, float, int]:
        rect = Rectangle(sigma0 + shift_sigma, right, T1 + shift_t, T2 + shift_t)
        report = locate_zeros(target, rect, refine_limit, threads)
        zero_side = sum(zero.location.real - rect.sigma_min for zero in report.zeros)
        left = _log_modulus_integral(target, rect.sigma_min, rect.t_min, rect.t_max)
        far = _log_modulus_integral(target, right, rect.t_min, rect.t_max)
        bottom_start = cmath.phase(target(complex(right, rect.t_min)))
        climb, _ = _segment_phase(
            target, complex(right, rect.t_min), complex(right, rect.t_max), refine_limit
        )
        top = _argument_integral(
            target, bottom_start + climb, rect.sigma_min, right, rect.t_max, refine_limit
        )
        bottom = _argument_integral(
            target, bottom_start, rect.sigma_min, right, rect.t_min, refine_limit
        )
        contour_side = (left - far + top - bottom) / (2.0 * math.pi)
        return zero_side, contour_side, len(report.zeros)

    (zero_side, contour_side, zeros), shift_t, shift_sigma = _with_jitter(
        run, f"Littlewood check of {target.label}"
    )
    residual = abs(zero_side - contour_side)
    return LittlewoodReport(
        sigma0,
        right,
        T1,
        T2,
        zero_side,
        contour_side,
        residual,
        residual / max(abs(zero_side), 1.0),
        zeros,
        shift_t,
        shift_sigma,
    )


def dh_search(
    target: ScanTarget,
    t_max: float,
    refine_limit: int = DEFAULT_REFINE_LIMIT,
    threads: int = 1,
) -> list[ZeroRecord]:
    """Zeros with Re s > 1 and 0 < Im s < t_max."""
    if target.spec is not None and target.spec.J == 1:
        _LOGGER.debug("%s is a single Euler product, no zeros right of 1", target.label)
        return []
    right = target.free_abscissa
    left = 1.0 + _DH_OFFSET
    if left >= right:
        return []
    found: list[ZeroRecord] = []
    start = 1.0 if target.pole is not None else 0.0
    while start < t_max:
        box = Rectangle(left, right, start, min(start + _DH_BOX_HEIGHT, t_max))

        def run(shift_t: float, shift_sigma: float, box: Rectangle = box) -> ZeroScanReport:
            return locate_zeros(target, box.shifted(shift_sigma, shift_t), refine_limit, threads)

        report, _, _ = _with_jitter(run, f"Off-line search of {target.label}")
        if report.zeros:
            _LOGGER.info("Found %d zeros right of 1 in %s", len(report.zeros), report.rect)
        found.extend(report.zeros)
        start += _DH_BOX_HEIGHT
    return found


@dataclass(frozen=True)
class ProbeReport:  # pylint: disable=too-many-instance-attributes
    """Mean of log |F| on a vertical line against the random model"""

    sigma: float
    T: float  # pylint: disable=invalid-name
    window: float
    line_mean: float
    model_mean: float
    model_stderr: float
    gap: float
    n_nodes: int
    jitter_sigma: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "sigma": self.sigma,
            "T": self.T,
            "window": self.window,
            "line_mean": self.line_mean,
            "model_mean": self.model_mean,
            "model_stderr": self.model_stderr,
            "gap": self.gap,
            "n_nodes": self.n_nodes,
            "jitter_sigma": self.jitter_sigma,
        }


def line_mean(  # pylint: disable=too-many-arguments
    spec: CombinationSpec,
    group: ClassGroup,
    sigma: float,
    t_min: float,
    t_max: float,
    n_nodes: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
    threads: int = 1,
) -> float:
    """(1 / (t_max - t_min)) int log |F(sigma + it)| dt by Gauss-Legendre panels."""
    nodes, weights = _gauss_nodes(t_min, t_max, n_nodes)
    values = np.array(
        evaluate_many(spec, group, [complex(sigma, t) for t in nodes], tol, threads)
    )
    scale = sum(abs(value) for value in spec.b)
    smallest = int(np.argmin(np.abs(values)))
    if abs(values[smallest]) < BOUNDARY_ZERO_FACTOR * scale:
        raise BoundaryZeroError(
            "Zero on the averaging line", complex(sigma, nodes[smallest]), abs(values[smallest])
        )
    return float(np.dot(weights, np.log(np.abs(values)))) / (t_max - t_min)


def conjecture_probe(  # pylint: disable=too-many-arguments
    spec: CombinationSpec,
    group: ClassGroup,
    theta: float,
    T: float,  # pylint: disable=invalid-name
    n_nodes: int = 2048,
    window: float | None = None,
    P: int = DEFAULT_PRIME_CUTOFF,  # pylint: disable=invalid-name
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tol: Tolerance = Tolerance(1e-8),
    threads: int = 1,
) -> ProbeReport:
    """Average of log |F_J(sigma_T + it)| over [T, T + window] versus E log |F_J(sigma_T : X)|."""
    window = T if window is None else window
    base = sigma_T(theta, T)

    def run(_: float, shift_sigma: float) -> float:
        return line_mean(spec, group, base + shift_sigma, T, T + window, n_nodes, tol, threads)

    mean, _, shift_sigma = _with_jitter(run, "Conjecture probe")
    sigma = base + shift_sigma
    model = build_instance(spec, group, P, seed)
    estimate = mc_estimate(model, sigma, n_samples, threads)
    _LOGGER.debug("Probe T=%g sigma=%g line=%g model=%g", T, sigma, mean, estimate.mean)
    return ProbeReport(
        sigma,
        T,
        window,
        mean,
        estimate.mean,
        estimate.stderr,
        mean - estimate.mean,
        n_nodes,
        shift_sigma,
    )


@dataclass(frozen=True)
class MainTermComparison:
    """Zero count against the main term of the density asymptotics"""

    count: int
    main_term: float
    ratio: float
    error_scale: float
    strip: StripCount

    def to_json(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "main_term": self.main_term,
            "ratio": self.ratio,
            "error_scale": self.error_scale,
            "strip": self.strip.to_json(),
        }


def compare_main_term(
    target: ScanTarget,
    theta: float,
    T: float,  # pylint: disable=invalid-name
    refine_limit: int = DEFAULT_REFINE_LIMIT,
    threads: int = 1,
) -> MainTermComparison:
    if target.spec is None:
        raise InvalidInputError("Main term comparison needs a combination target")
    strip = count_above(target, theta, T, refine_limit=refine_limit, threads=threads)
    main = zero_density_main_term(MainTermParams.from_spec(target.spec.normalize(), theta, T))
    return MainTermComparison(
        strip.count, main, strip.count / main, loglog(T) ** -0.75, strip
    )
