"""Acceptance pipeline.

Criteria are registered with the ``criterion`` decorator under a name and a
group.  ``reproduce`` runs the selected ones and returns a report; primary
criteria decide the outcome, exploratory ones are recorded only.  Library
errors raised inside a criterion fail that criterion and nothing else.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import json
import logging
import math
from pathlib import Path
import time
from typing import Any, Callable, Final, Sequence

import mpmath
import numpy as np

from epstein_zeros.asymptotics import (
    MOMENT_GRID,
    CoefficientTable,
    MainTermParams,
    calibrate,
    d_coeff,
    density_mass,
    I_mn_error,
    load_calibration,
    logint_envelope,
    moment_bound_check,
    prop_error_fit,
    q_origin,
    region_integral_u,
    region_weights,
    save_calibration,
)
from epstein_zeros.constants import DEFAULT_SEED
from epstein_zeros.epstein import (
    CombinationSpec,
    direct_series,
    epstein_evaluator,
    eval_epstein,
    eval_hecke_all,
    functional_residual,
)
from epstein_zeros.exceptions import (
    EpsteinError,
    InvalidInputError,
    UnsupportedCombinationError,
)
from epstein_zeros.manifest import (
    STATUS_FAIL,
    STATUS_PASS,
    STATUS_RECORDED,
    file_digest,
)
from epstein_zeros.quadforms import QuadForm, class_group
from epstein_zeros.randmodel import build_instance, soc_slope
from epstein_zeros.special import Tolerance
from epstein_zeros.streams import KeyedStream
from epstein_zeros.zeroscan import (
    Rectangle,
    ScanTarget,
    compare_main_term,
    conjecture_probe,
    dh_search,
    grid_count,
    littlewood_check,
    locate_zeros,
    winding_number,
)

_LOGGER = logging.getLogger(__name__)

BUNDLE_DIR: Final = "reproduce"
SOC_SIGMAS: Final = (0.51, 0.505, 0.502, 0.501)
SOC_DISCRIMINANTS: Final = (-15, -23)
FE_HEIGHTS: Final = (-50.0, 50.0)
_MC_CHUNK: Final = 1_000_000


@dataclass(frozen=True)
class ReproduceConfig:
    """Knobs shared by all criteria"""

    seed: int = DEFAULT_SEED
    threads: int = 1
    quick: bool = False
    calibration: Path | None = None

    def pick(self, full: Any, quick: Any) -> Any:
        return quick if self.quick else full

    def to_json(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "quick": self.quick,
            "calibration": str(self.calibration) if self.calibration else None,
        }


Check = Callable[[ReproduceConfig], tuple[bool, dict[str, Any]]]


@dataclass(frozen=True)
class Criterion:
    name: str
    group: str
    check: Check
    primary: bool = True
    description: str = ""


@dataclass
class CriterionResult:
    """Outcome of one criterion; elapsed time stays out of the payload"""

    name: str
    group: str
    status: str
    primary: bool
    details: dict[str, Any]
    elapsed: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "group": self.group,
            "status": self.status,
            "primary": self.primary,
            "details": self.details,
        }


@dataclass
class ReproduceReport:
    config: ReproduceConfig
    results: list[CriterionResult] = field(default_factory=list)

    @property
    def failing(self) -> list[str]:
        return [
            result.name
            for result in self.results
            if result.primary and result.status == STATUS_FAIL
        ]

    @property
    def passed(self) -> bool:
        return not self.failing

    def statuses(self) -> dict[str, str]:
        return {result.name: result.status for result in self.results}

    def timing(self) -> dict[str, float]:
        return {f"{result.name}_s": round(result.elapsed, 3) for result in self.results}

    def to_json(self) -> dict[str, Any]:
        return {
            "config": self.config.to_json(),
            "status": STATUS_PASS if self.passed else STATUS_FAIL,
            "failing": self.failing,
            "criteria": {result.name: result.to_json() for result in self.results},
        }


_CRITERIA: dict[str, Criterion] = {}


def criterion(name: str, group: str, primary: bool = True) -> Callable[[Check], Check]:
    """Registers a check returning (passed, details)."""

    def register(check: Check) -> Check:
        _CRITERIA[name] = Criterion(name, group, check, primary, (check.__doc__ or "").strip())
        return check

    return register


def groups() -> list[str]:
    return sorted({item.group for item in _CRITERIA.values()})


def select(filters: Sequence[str] | None = None) -> list[Criterion]:
    """Criteria whose group or name is listed, all of them without filters."""
    if not filters:
        return list(_CRITERIA.values())
    known = set(_CRITERIA) | set(groups())
    unknown = [item for item in filters if item not in known]
    if unknown:
        raise InvalidInputError(
            f"Unknown criteria {unknown}, choose from groups {groups()} or {sorted(_CRITERIA)}"
        )
    return [
        item for item in _CRITERIA.values() if item.group in filters or item.name in filters
    ]


def run_criterion(item: Criterion, config: ReproduceConfig) -> CriterionResult:
    _LOGGER.info("Running %s (%s)", item.name, item.group)
    started = time.perf_counter()
    try:
        passed, details = item.check(config)
    except EpsteinError as ex:
        _LOGGER.error("Criterion %s raised %s", item.name, ex)
        passed, details = False, {"error": str(ex), "error_type": type(ex).__name__}
    elapsed = time.perf_counter() - started
    if not item.primary:
        status = STATUS_RECORDED
    else:
        status = STATUS_PASS if passed else STATUS_FAIL
    _LOGGER.info("%s: %s in %.1f s", item.name, status, elapsed)
    return CriterionResult(item.name, item.group, status, item.primary, details, elapsed)


def reproduce(
    config: ReproduceConfig,
    filters: Sequence[str] | None = None,
    recalibrate: bool = False,
) -> ReproduceReport:
    selected = select(filters)
    if recalibrate:
        calibration = calibrate(
            n_samples=config.pick(1_000_000, 100_000),
            seed=config.seed,
            threads=config.threads,
        )
        save_calibration(calibration, config.calibration)
    report = ReproduceReport(config)
    for item in selected:
        report.results.append(run_criterion(item, config))
    if report.failing:
        _LOGGER.warning("Failing criteria: %s", ", ".join(report.failing))
    return report


def write_bundle(report: ReproduceReport, directory: str | Path) -> dict[str, str]:
    """One JSON file per criterion plus a summary; returns file digests."""
    bundle = Path(directory) / BUNDLE_DIR
    bundle.mkdir(parents=True, exist_ok=True)
    digests = {}
    payloads = {result.name: result.to_json() for result in report.results}
    payloads["summary"] = report.to_json()
    for name, payload in payloads.items():
        path = bundle / f"{name}.json"
        with open(path, "w", encoding="utf-8") as stream:
            json.dump(payload, stream, indent=2, sort_keys=True)
            stream.write("\n")
        digests[f"{BUNDLE_DIR}/{path.name}"] = file_digest(path)
    return digests


# Helpers


def _points(
    seed: int,
    domain: str,
    count: int,
    real: tuple[float, float],
    imag: tuple[float, float],
) -> list[complex]:
    """Keyed pseudo-random points in a box of the s-plane."""
    draws = KeyedStream(seed, domain).uniforms(0, 2 * count)
    re = real[0] + (real[1] - real[0]) * draws[:count]
    im = imag[0] + (imag[1] - imag[0]) * draws[count:]
    return [complex(x, y) for x, y in zip(re, im)]


def _relative(value: complex, expected: complex) -> float:
    return abs(value - expected) / max(abs(expected), 1.0)


# Evaluation


@criterion("epstein_evaluation", "epstein")
def _epstein_evaluation(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """E(2, x^2 + y^2) = 4 zeta(2) beta(2); continuation agrees with the Dirichlet series."""
    evaluator = epstein_evaluator(QuadForm(1, 0, 1))
    value = eval_epstein(evaluator, 2.0)
    exact = float(4 * mpmath.zeta(2) * mpmath.catalan)
    exact_error = abs(value - exact) / exact

    tol = Tolerance(1e-13)
    worst = {"re_ge_2": 0.0, "re_lt_2": 0.0}
    for s in _points(config.seed, "epstein/direct", config.pick(50, 10), (1.5, 3.0), (-20.0, 20.0)):
        error = _relative(eval_epstein(evaluator, s, tol), direct_series(evaluator, s))
        key = "re_ge_2" if s.real >= 2.0 else "re_lt_2"
        worst[key] = max(worst[key], error)
    passed = exact_error <= 1e-10 and worst["re_ge_2"] <= 1e-10 and worst["re_lt_2"] <= 1e-6
    return passed, {
        "E_2": {"re": value.real, "im": value.imag},
        "exact": exact,
        "exact_rel_error": exact_error,
        "direct_series_rel_error": worst,
        "tolerance": {"re_ge_2": 1e-10, "re_lt_2": 1e-6},
    }


@criterion("functional_equation", "epstein")
def _functional_equation(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Completed combinations are symmetric under s -> 1 - s."""
    tol = Tolerance(1e-12)
    worst: dict[str, float] = {}
    skipped = []
    for disc in (-15, -20, -23, -24):
        group = class_group(disc)
        for index in range(group.h):
            try:
                spec = CombinationSpec.from_class(group, index)
            except UnsupportedCombinationError:
                skipped.append(f"{disc}/{index}")
                continue
            points = _points(
                config.seed,
                f"fe/{disc}/{index}",
                config.pick(100, 10),
                (-1.0, 2.0),
                FE_HEIGHTS,
            )
            worst[f"{disc}/{index}"] = max(
                functional_residual(spec, group, s, tol) for s in points
            )
    return max(worst.values()) <= 1e-8, {"worst_residual": worst, "skipped": skipped, "tolerance": 1e-8}


@criterion("pole_residue", "epstein")
def _pole_residue(_: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """(s - 1) E(s, Q) near s = 1 equals 2 pi / sqrt|D|."""
    offset = 1e-6
    errors = {}
    for disc in (-3, -4, -15, -20, -23, -24):
        group = class_group(disc)
        expected = 2.0 * math.pi / math.sqrt(-disc)
        for form in group.forms:
            value = offset * eval_epstein(epstein_evaluator(form), 1.0 + offset)
            errors[f"{disc}/{form.a},{form.b},{form.c}"] = abs(value - expected) / expected
    return max(errors.values()) <= 1e-4, {"rel_error": errors, "tolerance": 1e-4}


@criterion("characters", "epstein")
def _characters(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Character orthogonality, class functions rebuilt from Hecke values, xi products."""
    tol = Tolerance(1e-13)
    details: dict[str, Any] = {}
    passed = True
    for disc, expected_product in ((-15, 16), (-23, 8)):
        group = class_group(disc)
        gram = group.chars @ group.chars.conj().T / group.h
        orthogonality = float(np.max(np.abs(gram - np.eye(group.h))))
        roundtrip = 0.0
        for s in _points(config.seed, f"characters/{disc}", 20, (-1.0, 3.0), (-10.0, 10.0)):
            values = eval_hecke_all(group, s, tol)
            for index, form in enumerate(group.forms):
                rebuilt = group.w / group.h * np.sum(np.conj(group.chars[:, index]) * values)
                direct = eval_epstein(epstein_evaluator(form), s, tol)
                roundtrip = max(roundtrip, _relative(rebuilt, direct))
        product = math.prod(group.xi())
        formula = 2 ** (3 * group.J - group.h)
        details[str(disc)] = {
            "orthogonality_error": orthogonality,
            "roundtrip_rel_error": roundtrip,
            "xi": group.xi(),
            "xi_product": product,
            "power_of_two": formula,
        }
        passed &= orthogonality <= 1e-12 and roundtrip <= 1e-12
        passed &= product == formula == expected_product
    return passed, details


# Random model


@criterion("soc_slopes", "randmodel")
def _soc_slopes(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Sums of a_j(p) a_l(p) p^(-2 sigma) grow like (xi_j / 2) log 1/(2 sigma - 1)."""
    prime_bound = config.pick(10**7, 10**6)
    slopes = {}
    passed = True
    for disc in SOC_DISCRIMINANTS:
        group = class_group(disc)
        spec = CombinationSpec.from_class(group, 0, normalize=True)
        model = build_instance(spec, group, P=prime_bound, seed=config.seed)
        chars = enumerate(spec.characters)
        for (row, j), (col, l) in itertools.product(chars, repeat=2):
            slope, _ = soc_slope(model, j, l, SOC_SIGMAS)
            if row == col:
                target = spec.xi[row] / 2.0
                ok = abs(slope / target - 1.0) <= 0.15
            else:
                target = 0.0
                ok = abs(slope) <= 0.3
            slopes[f"{disc}/{j},{l}"] = {"slope": slope, "target": target, "ok": ok}
            passed &= ok
    return passed, {"P": prime_bound, "sigmas": list(SOC_SIGMAS), "slopes": slopes}


# Main terms


@criterion("region_integrals", "mainterm")
def _region_integrals(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Partition identity, the equal-xi closed form and a Monte Carlo cross-check."""
    partition = 0.0
    for size in range(1, 5):
        for xi in itertools.product((2, 4), repeat=size):
            expected = math.prod(math.sqrt(math.pi * value) for value in xi)
            partition = max(partition, abs(sum(region_weights(xi)) - expected) / expected)
    closed = abs(region_integral_u((4, 4)) - 4.0 * math.sqrt(2.0 * math.pi)) / (
        4.0 * math.sqrt(2.0 * math.pi)
    )

    xi = (4, 2, 2)
    n_samples = config.pick(10**7, 10**6)
    scale = np.sqrt(np.asarray(xi, dtype=float) / 2.0)
    stream = KeyedStream(config.seed, "region/mc")
    total = square = 0.0
    for chunk, first in enumerate(range(0, n_samples, _MC_CHUNK)):
        rows = min(_MC_CHUNK, n_samples - first)
        draws = stream.child(f"chunk{chunk}").normal_rows(rows, len(xi), config.threads)
        largest = np.max(draws * scale, axis=1)
        total += float(np.sum(largest))
        square += float(np.sum(largest * largest))
    mass = math.prod(math.sqrt(math.pi * value) for value in xi)
    mean = total / n_samples
    stderr = mass * math.sqrt((square / n_samples - mean * mean) / n_samples)
    quadrature = region_integral_u(xi)
    deviation = abs(mass * mean - quadrature)
    passed = partition <= 1e-9 and closed <= 1e-8 and deviation <= 3.0 * stderr
    return passed, {
        "partition_rel_error": partition,
        "closed_form_rel_error": closed,
        "monte_carlo": {
            "xi": list(xi),
            "n": n_samples,
            "estimate": mass * mean,
            "stderr": stderr,
            "quadrature": quadrature,
        },
    }


def _xi_patterns(max_size: int) -> list[tuple[int, ...]]:
    return [
        xi
        for size in range(1, max_size + 1)
        for xi in itertools.product((4, 2), repeat=size)
    ]


@criterion("coefficient_identities", "mainterm")
def _coefficient_identities(_: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Origin coefficients in closed form and the vanishing pattern of q."""
    origin = 0.0
    for xi in _xi_patterns(4):
        size = len(xi)
        q_zero = q_origin(xi)
        product = q_zero * d_coeff((0,) * size, xi)
        origin = max(
            origin,
            abs(q_zero * math.pi**size * math.prod(xi) - 1.0),
            abs(product * math.pi ** (size / 2) * math.sqrt(math.prod(xi)) - 1.0),
        )
    checked = vanishing = 0
    misplaced = []
    for xi in ((4, 4), (4, 2), (2, 2)):
        table = CoefficientTable.build(xi, max_weight=7)
        for index, value in table.q.items():
            weight = sum(2 * a + b for a, b in zip(index[0] + index[1], index[2] + index[3]))
            if weight == 1 or weight > 5:
                checked += 1
                if value != 0:
                    vanishing += 1
        for index in table.vacant:
            weight = sum(2 * a + b for a, b in zip(index[0] + index[1], index[2] + index[3]))
            if not 2 <= weight <= 5:
                misplaced.append([list(vector) for vector in index])
    passed = origin <= 1e-14 and vanishing == 0 and not misplaced
    return passed, {
        "origin_rel_error": origin,
        "vanishing_checked": checked,
        "vanishing_violations": vanishing,
        "misplaced_vacancies": misplaced,
    }


@criterion("density_normalization", "mainterm")
def _density_normalization(_: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """The leading density integrates to one."""
    errors = {}
    for xi in _xi_patterns(3):
        b = (1.0,) * len(xi)
        for L in (1.0, 4.0, 16.0):  # pylint: disable=invalid-name
            mass = density_mass(MainTermParams.from_L(xi, b, L))
            errors[f"{','.join(map(str, xi))}@{L:g}"] = abs(mass - 1.0)
    return max(errors.values()) <= 1e-9, {"mass_error": errors, "tolerance": 1e-9}


@criterion("I_mn_decomposition", "mainterm")
def _I_mn_decomposition(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:  # pylint: disable=invalid-name
    """I_{0,0} minus its main terms shrinks under a single C L^(-1/4) envelope."""
    L_values = (4.0, 9.0, 16.0)  # pylint: disable=invalid-name
    n_samples = config.pick(10**6, 10**5)
    b = (1.0, 1.0)
    details = {}
    passed = True
    for xi in ((4, 4), (4, 2)):
        errors = [
            I_mn_error(
                (0, 0),
                (0, 0),
                MainTermParams.from_L(xi, b, L),
                n_samples,
                config.seed,
                config.threads,
            )
            for L in L_values
        ]
        fit = prop_error_fit(L_values, errors)
        details[",".join(map(str, xi))] = fit.to_json()
        passed &= fit.holds
    return passed, {"n": n_samples, "fits": details}


# Zeros


def _synthetic_target() -> tuple[ScanTarget, tuple[complex, complex]]:
    roots = (0.6 + 10.0j, 0.8 + 12.0j)
    target = ScanTarget.from_callable(
        lambda s: (s - roots[0]) * (s - roots[1]),
        label="(s - 0.6 - 10i)(s - 0.8 - 12i)",
        free_abscissa=1.5,
    )
    return target, roots


def _matched(points: Sequence[complex], expected: Sequence[complex], tol: float) -> bool:
    if len(points) != len(expected):
        return False
    remaining = list(expected)
    for point in points:
        distances = [abs(point - other) for other in remaining]
        best = int(np.argmin(distances))
        if distances[best] > tol:
            return False
        remaining.pop(best)
    return True


@criterion("zero_counting", "zeros")
def _zero_counting(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Winding numbers, the subdivision oracle, zero symmetries and Littlewood's lemma."""
    threads = config.threads
    details: dict[str, Any] = {}

    synthetic, roots = _synthetic_target()
    box = Rectangle(0.4, 1.4, 8.0, 14.0)
    scan = locate_zeros(synthetic, box, threads=threads)
    lemma = littlewood_check(synthetic, 0.5, 8.0, 14.0, threads=threads)
    synthetic_ok = (
        scan.winding == 2
        and _matched([zero.location for zero in scan.zeros], roots, 1e-8)
        and lemma.relative <= 1e-4
    )
    details["synthetic"] = {
        "scan": scan.to_json(),
        "littlewood": lemma.to_json(),
        "ok": synthetic_ok,
    }

    group = class_group(-15)
    spec = CombinationSpec.from_class(group, 0)
    target = ScanTarget.from_spec(spec, group, Tolerance(1e-10))
    t_max = config.pick(40.0, 20.0)
    rect = Rectangle(0.4, 1.4, 10.0, t_max)
    upper = locate_zeros(target, rect, threads=threads)
    oracle = grid_count(target, rect)
    lower = locate_zeros(target, Rectangle(0.4, 1.4, -t_max, -10.0), threads=threads)
    upper_zeros = [zero.location for zero in upper.zeros]
    conjugate_ok = _matched(
        [zero.location for zero in lower.zeros], [z.conjugate() for z in upper_zeros], 1e-8
    )
    mirrored = []
    for zero in upper_zeros:
        if abs(zero.real - 0.5) <= 1e-6:
            continue
        image = 1.0 - zero.conjugate()
        mirror_box = Rectangle(image.real - 0.01, image.real + 0.01, image.imag - 0.01, image.imag + 0.01)
        mirrored.append(
            {"zero": {"re": zero.real, "im": zero.imag}, "winding": winding_number(target, mirror_box)}
        )
    functional_ok = all(item["winding"] >= 1 for item in mirrored)
    lemma = littlewood_check(target, 0.55, 20.0, config.pick(40.0, 25.0), threads=threads)
    details["D=-15"] = {
        "scan": upper.to_json(),
        "oracle": oracle,
        "conjugate_scan": lower.to_json(),
        "conjugate_ok": conjugate_ok,
        "off_line_mirrors": mirrored,
        "littlewood": lemma.to_json(),
    }
    passed = (
        synthetic_ok
        and upper.winding == oracle
        and len(upper.zeros) == upper.winding
        and conjugate_ok
        and functional_ok
        and lemma.relative <= 1e-4
    )
    return passed, details


# Envelopes


@criterion("envelopes", "envelopes")
def _envelopes(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Log-integral and moment bounds under the frozen calibration constants."""
    calibration = load_calibration(config.calibration)
    log_integral = logint_envelope(calibration.log_integral)
    n_samples = config.pick(10**6, 10**5)
    grid = config.pick(MOMENT_GRID, (1.0, 10.0, 100.0))
    moments = []
    passed = log_integral.holds
    for size in (1, 2):
        constant = calibration.moment_constant(size)
        b = (1.0 / math.sqrt(size),) * size
        for k, M in itertools.product((1, 2, 3), grid):  # pylint: disable=invalid-name
            check = moment_bound_check(
                k, M, b, n_samples, config.seed, constant=constant, threads=config.threads
            )
            moments.append({"J": size, **check.to_json()})
            passed &= check.holds
    return passed, {
        "calibration": calibration.to_json(),
        "log_integral": log_integral.to_json(),
        "moments": moments,
    }


# Exploratory


@criterion("conjecture_probe_trend", "exploratory", primary=False)
def _probe_trend(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Gap between line averages and the random model as T grows."""
    group = class_group(-15)
    spec = CombinationSpec.from_class(group, 0, normalize=True)
    reports = [
        conjecture_probe(
            spec,
            group,
            0.5,
            height,
            n_nodes=config.pick(64, 16),
            window=config.pick(2.0, 1.0),
            P=config.pick(10**6, 10**5),
            n_samples=config.pick(100_000, 10_000),
            seed=config.seed,
            threads=config.threads,
        )
        for height in config.pick((100.0, 200.0, 400.0), (20.0, 40.0))
    ]
    gaps = [abs(report.gap) for report in reports]
    decreasing = all(later <= earlier for earlier, later in zip(gaps, gaps[1:]))
    return decreasing, {"probes": [report.to_json() for report in reports], "decreasing": decreasing}


@criterion("main_term_ratio", "exploratory", primary=False)
def _main_term_ratio(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Zero count above sigma_T against the main term at a desk-scale height."""
    group = class_group(-15)
    spec = CombinationSpec.from_class(group, 0, normalize=True)
    target = ScanTarget.from_spec(spec, group, Tolerance(1e-10))
    comparison = compare_main_term(target, 0.5, config.pick(30.0, 12.0), threads=config.threads)
    within = 0.2 <= comparison.ratio <= 5.0
    return within, {"comparison": comparison.to_json(), "within_factor_5": within}


@criterion("off_line_search", "exploratory", primary=False)
def _off_line_search(config: ReproduceConfig) -> tuple[bool, dict[str, Any]]:
    """Zeros of E(s, Q) to the right of Re s = 1."""
    group = class_group(-15)
    spec = CombinationSpec.from_class(group, 0)
    target = ScanTarget.from_spec(spec, group, Tolerance(1e-10))
    t_max = config.pick(100.0, 30.0)
    found = dh_search(target, t_max, threads=config.threads)
    return bool(found), {"t_max": t_max, "zeros": [zero.to_json() for zero in found]}
