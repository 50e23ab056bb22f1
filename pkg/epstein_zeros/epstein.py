"""Epstein zeta functions, Hecke L-functions and their combinations.

The continuation used everywhere is the theta-splitting formula

    E(s,Q) = pi^s/Gamma(s) * [ 1/(sqrt(Delta)(s-1)) - 1/s
                               + sum (pi Q(x))^-s Gamma(s, pi Q(x))
                               + 1/sqrt(Delta) sum (pi Q*(x))^(s-1) Gamma(1-s, pi Q*(x)) ]

with Q* = (c, -b, a) / Delta, whose value multiset is that of Q scaled by
1/Delta. The bracket is of size exp(-pi |Im s| / 2) while single terms are
O(1), so high evaluations run the bracket in mpmath with enough digits.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
import logging
import math
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint

from epstein_zeros.constants import (
    DEFAULT_LATTICE_CUTOFF,
    DEFAULT_MAX_HEIGHT,
    POLE_EXCLUSION,
)
from epstein_zeros.exceptions import (
    InvalidInputError,
    PoleAtOneError,
    PoleOfGammaError,
    UnsupportedCombinationError,
)
from epstein_zeros.quadforms import (
    ClassGroup,
    QuadForm,
    SplitKind,
    reduce,
    representation_counts,
    splitting,
)
from epstein_zeros.special import (
    DEFAULT_TOLERANCE,
    Tolerance,
    height_loss,
    mp_context,
    needs_multiprecision,
    required_digits,
    rgamma,
    upper_gamma,
)
from epstein_zeros.util import is_very_verbose

_LOGGER = logging.getLogger(__name__)

# Dirichlet series cutoff for the direct-sum cross check.
DIRECT_SERIES_LIMIT = 2_000_000


def _value_limit(delta: float, cutoff: float, height: float) -> int:
    """Largest lattice value needed at given height."""
    top = cutoff + math.pi * abs(height) / 2.0
    return int(math.ceil(top * max(1.0, delta) / math.pi))


@lru_cache(maxsize=256)
def _form_lattice(form: QuadForm, limit: int) -> tuple[np.ndarray, np.ndarray]:
    values, counts = representation_counts(form, limit)
    _LOGGER.debug("Lattice of %s up to %d: %d distinct values", form, limit, len(values))
    return values, counts


@lru_cache(maxsize=64)
def _union_lattice(forms: tuple[QuadForm, ...], limit: int) -> tuple[np.ndarray, np.ndarray]:
    lattices = [_form_lattice(form, limit) for form in forms]
    values = np.unique(np.concatenate([vals for vals, _ in lattices]))
    mults = np.zeros((len(forms), len(values)), dtype=np.int64)
    for row, (vals, counts) in enumerate(lattices):
        mults[row, np.searchsorted(values, vals)] = counts
    return values, mults


@dataclass(frozen=True)
class Brackets:
    """Continuation brackets of several forms sharing one discriminant at s"""

    s: complex
    delta: float
    raw: np.ndarray
    full: np.ndarray
    prefactor: complex
    shifted_prefactor: complex
    digits: int

    def near_pole(self) -> bool:
        return abs(self.s - 1.0) < 0.5 or abs(self.s) < 0.5

    def _pole_part(self) -> complex:
        """pi^s/Gamma(s) (1/(sqrt(Delta)(s-1)) - 1/s), exact at s = 0."""
        return (
            self.prefactor / (math.sqrt(self.delta) * (self.s - 1.0))
            - self.shifted_prefactor
        )

    def combine(self, weights: np.ndarray, pole: complex) -> complex:
        """Value of sum_k weights[k] E_k(s); pole = sum of weights."""
        if pole != 0 and abs(self.s - 1.0) < POLE_EXCLUSION:
            raise PoleAtOneError(f"Combination has a pole at s=1, got s={self.s}")
        if self.near_pole():
            value = self.prefactor * complex(weights @ self.raw)
            if pole != 0:
                value += pole * self._pole_part()
            return value
        return self.prefactor * complex(weights @ self.full)

    def combine_completed(self, weights: np.ndarray, pole: complex) -> complex:
        """Delta^(s/2) pi^-s Gamma(s) sum_k weights[k] E_k(s)."""
        scale = np.exp(self.s * math.log(self.delta) / 2.0)
        if self.near_pole():
            bracket = complex(weights @ self.raw)
            if pole != 0:
                if abs(self.s - 1.0) < POLE_EXCLUSION:
                    raise PoleAtOneError(f"Completed function has a pole at s={self.s}")
                if abs(self.s) < POLE_EXCLUSION:
                    raise PoleOfGammaError(
                        f"Completed function has a pole at s={self.s}"
                    )
                bracket += pole * (
                    1.0 / (math.sqrt(self.delta) * (self.s - 1.0)) - 1.0 / self.s
                )
            return complex(scale * bracket)
        return complex(scale * complex(weights @ self.full))


def _double_terms(values: np.ndarray, delta: float, s: complex, top: float, tol: Tolerance) -> np.ndarray:
    root = math.sqrt(delta)
    terms = np.zeros(len(values), dtype=complex)
    for position, k in enumerate(values.tolist()):
        x = math.pi * k
        term = 0.0j
        if x <= top:
            term += np.exp(-s * math.log(x)) * upper_gamma(s, x, tol)
        y = x / delta
        term += np.exp((s - 1.0) * math.log(y)) * upper_gamma(1.0 - s, y, tol) / root
        terms[position] = term
    return terms


def compute_brackets(
    values: np.ndarray,
    mults: np.ndarray,
    delta: float,
    s: complex,
    tol: Tolerance = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_LATTICE_CUTOFF,
) -> Brackets:
    """Continuation brackets for every row of the multiplicity matrix."""
    s = complex(s)
    top = cutoff + math.pi * abs(s.imag) / 2.0
    digits = required_digits(tol.rel_err, s.imag)
    if not needs_multiprecision(tol.rel_err, s.imag):
        term_tol = tol.tightened(10.0 ** height_loss(s.imag))
        terms = _double_terms(values, delta, s, top, term_tol)
        raw = mults @ terms
        if s in (0.0, 1.0):
            full = np.full(raw.shape, np.nan, dtype=complex)
        else:
            full = raw + (1.0 / (math.sqrt(delta) * (s - 1.0)) - 1.0 / s)
        pi_s = np.exp(s * math.log(math.pi))
        return Brackets(
            s, delta, raw, full, pi_s * rgamma(s), pi_s * rgamma(1.0 + s), 15
        )

    ctx = mp_context(digits)
    sm = ctx.mpc(s.real, s.imag)
    ctx_delta = ctx.mpf(delta)
    root = ctx.sqrt(ctx_delta)
    terms = []
    for k in values.tolist():
        x = ctx.pi * k
        term = ctx.mpc(0)
        if math.pi * k <= top:
            term += ctx.power(x, -sm) * ctx.gammainc(sm, x)
        y = x / ctx_delta
        term += ctx.power(y, sm - 1) * ctx.gammainc(1 - sm, y) / root
        terms.append(term)
    # at s = 0 and s = 1 only the raw bracket is defined; Brackets.combine adds the pole part
    pole_bracket = None if s in (0.0, 1.0) else 1 / (root * (sm - 1)) - 1 / sm
    raw, full = [], []
    for row in mults:
        total = ctx.fsum(int(m) * t for m, t in zip(row.tolist(), terms) if m)
        raw.append(complex(total))
        if pole_bracket is None:
            full.append(complex(math.nan, math.nan))
        else:
            full.append(complex(total + pole_bracket))
    pi_s = ctx.power(ctx.pi, sm)
    if is_very_verbose():
        _LOGGER.debug("Brackets at s=%s with %d digits: %s", s, digits, full)
    return Brackets(
        s,
        delta,
        np.array(raw, dtype=complex),
        np.array(full, dtype=complex),
        complex(pi_s * ctx.rgamma(sm)),
        complex(pi_s * ctx.rgamma(1 + sm)),
        digits,
    )


class EpsteinEvaluator:
    """Precomputed lattice data for continuation of E(s, Q)"""

    def __init__(
        self,
        form: QuadForm,
        cutoff: float = DEFAULT_LATTICE_CUTOFF,
        max_height: float = DEFAULT_MAX_HEIGHT,
    ) -> None:
        self.form = reduce(form)
        self.delta = self.form.determinant
        self.cutoff = cutoff
        self.max_height = max_height
        self._limit = _value_limit(self.delta, cutoff, max_height)
        self.values, self.counts = _form_lattice(self.form, self._limit)

    @property
    def dual(self) -> QuadForm:
        """Integral form (c,-b,a); Q* is this form divided by Delta."""
        return QuadForm(self.form.c, -self.form.b, self.form.a)

    @property
    def dual_scale(self) -> float:
        return 1.0 / self.delta

    def lattice(self, height: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        limit = _value_limit(self.delta, self.cutoff, height)
        if limit <= self._limit:
            stop = int(np.searchsorted(self.values, limit, side="right"))
            return self.values[:stop], self.counts[:stop]
        _LOGGER.debug("Extending lattice of %s to value %d", self.form, limit)
        return _form_lattice(self.form, limit)

    def brackets(self, s: complex, tol: Tolerance = DEFAULT_TOLERANCE) -> Brackets:
        values, counts = self.lattice(complex(s).imag)
        return compute_brackets(values, counts[np.newaxis, :], self.delta, s, tol, self.cutoff)

    def __repr__(self) -> str:
        return f"EpsteinEvaluator({self.form}, values={len(self.values)})"


@lru_cache(maxsize=128)
def epstein_evaluator(form: QuadForm) -> EpsteinEvaluator:
    return EpsteinEvaluator(form)


def eval_epstein(
    evaluator: EpsteinEvaluator, s: complex, tol: Tolerance = DEFAULT_TOLERANCE
) -> complex:
    """E(s, Q) for s != 1."""
    return evaluator.brackets(s, tol).combine(np.ones(1), 1.0)


class HeckeEvaluator:
    """Lattice data of all classes of a class group"""

    def __init__(
        self,
        group: ClassGroup,
        cutoff: float = DEFAULT_LATTICE_CUTOFF,
        max_height: float = DEFAULT_MAX_HEIGHT,
    ) -> None:
        self.group = group
        self.delta = -group.D / 4.0
        self.cutoff = cutoff
        self._limit = _value_limit(self.delta, cutoff, max_height)
        self.values, self.mults = _union_lattice(group.forms, self._limit)

    def brackets(self, s: complex, tol: Tolerance = DEFAULT_TOLERANCE) -> Brackets:
        s = complex(s)
        limit = _value_limit(self.delta, self.cutoff, s.imag)
        if limit <= self._limit:
            stop = int(np.searchsorted(self.values, limit, side="right"))
            values, mults = self.values[:stop], self.mults[:, :stop]
        else:
            values, mults = _union_lattice(self.group.forms, limit)
        return compute_brackets(values, mults, self.delta, s, tol, self.cutoff)

    def character_weights(self, j: int) -> tuple[np.ndarray, complex]:
        """Class weights and pole weight of L_j = (1/w) sum_k chi_j(A_k) E_k."""
        group = self.group
        weights = group.chars[j] / group.w
        pole = group.h / group.w if j == 0 else 0.0
        return weights, pole


@lru_cache(maxsize=32)
def hecke_evaluator(group: ClassGroup) -> HeckeEvaluator:
    return HeckeEvaluator(group)


def eval_hecke(
    group: ClassGroup, j: int, s: complex, tol: Tolerance = DEFAULT_TOLERANCE
) -> complex:
    """L(s, chi_j) rebuilt from the class Epstein functions."""
    if not 0 <= j < group.h:
        raise InvalidInputError(f"Character index {j} out of range for h={group.h}")
    evaluator = hecke_evaluator(group)
    weights, pole = evaluator.character_weights(j)
    return evaluator.brackets(s, tol).combine(weights, pole)


def eval_hecke_all(
    group: ClassGroup, s: complex, tol: Tolerance = DEFAULT_TOLERANCE
) -> np.ndarray:
    """All h values L(s, chi_j) from one set of brackets."""
    evaluator = hecke_evaluator(group)
    brackets = evaluator.brackets(s, tol)
    return np.array(
        [brackets.combine(*evaluator.character_weights(j)) for j in range(group.h)]
    )


@dataclass(frozen=True)
class CombinationSpec:  # pylint: disable=too-many-instance-attributes
    """Coefficients of F_J(s) = sum_j b_j L_j(s) over merged characters"""

    b: tuple[complex, ...]
    xi: tuple[int, ...]
    characters: tuple[int, ...]
    D: int | None = None  # pylint: disable=invalid-name
    class_index: int | None = None
    normalized: bool = False
    scale: float = 1.0
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.b:
            raise InvalidInputError("Combination needs at least one coefficient")
        if len(self.xi) != len(self.b) or len(self.characters) != len(self.b):
            raise InvalidInputError(
                f"Lengths of b ({len(self.b)}), xi ({len(self.xi)}) and characters differ"
            )
        if any(value == 0 for value in self.b):
            raise UnsupportedCombinationError(f"Coefficients must be nonzero: {self.b}")
        if any(value not in (2, 4) for value in self.xi):
            raise InvalidInputError(f"xi values must be 2 or 4: {self.xi}")

    @property
    def J(self) -> int:  # pylint: disable=invalid-name
        return len(self.b)

    @property
    def xi_product(self) -> int:
        return math.prod(self.xi)

    @property
    def has_pole(self) -> bool:
        return 0 in self.characters

    def normalize(self) -> CombinationSpec:
        """Same combination scaled to sum |b_j|^2 = 1."""
        norm = math.sqrt(sum(abs(value) ** 2 for value in self.b))
        return CombinationSpec(
            b=tuple(value / norm for value in self.b),
            xi=self.xi,
            characters=self.characters,
            D=self.D,
            class_index=self.class_index,
            normalized=True,
            scale=self.scale / norm,
            label=self.label,
        )

    @classmethod
    def from_class(
        cls, group: ClassGroup, class_index: int, normalize: bool = False
    ) -> CombinationSpec:
        """Decomposition E(s, Q_A) = sum_j b_j L_j(s)."""
        if not 0 <= class_index < group.h:
            raise InvalidInputError(f"Class index {class_index} out of range")
        coefficients = []
        for j in group.merged_characters():
            value = group.chars[j, class_index]
            merged = value.real if group.is_real(j) else 2.0 * value.real
            coefficients.append(group.w / group.h * merged)
        if any(abs(value) < 1e-12 for value in coefficients):
            raise UnsupportedCombinationError(
                f"Class {class_index} of D={group.D} has a vanishing merged coefficient"
            )
        spec = cls(
            b=tuple(complex(value) for value in coefficients),
            xi=tuple(group.xi()),
            characters=tuple(group.merged_characters()),
            D=group.D,
            class_index=class_index,
            label=f"E(s,{group.forms[class_index]})",
        )
        return spec.normalize() if normalize else spec

    @classmethod
    def from_coefficients(
        cls,
        b: Sequence[complex],
        xi: Sequence[int] | None = None,
        group: ClassGroup | None = None,
        normalize: bool = False,
    ) -> CombinationSpec:
        """Explicit coefficients, consistent with group when given."""
        if group is not None:
            if len(b) != group.J:
                raise InvalidInputError(
                    f"D={group.D} needs J={group.J} coefficients, got {len(b)}"
                )
            xi = group.xi() if xi is None else xi
            characters = tuple(group.merged_characters())
            disc = group.D
        else:
            if xi is None:
                raise InvalidInputError("xi is required without a class group")
            characters = tuple(range(len(b)))
            disc = None
        spec = cls(
            b=tuple(complex(value) for value in b),
            xi=tuple(int(value) for value in xi),
            characters=characters,
            D=disc,
            label="F_J",
        )
        return spec.normalize() if normalize else spec

    def to_json(self) -> dict:
        return {
            "J": self.J,
            "b": [{"re": z.real, "im": z.imag} for z in self.b],
            "xi": list(self.xi),
            "characters": list(self.characters),
            "D": self.D,
            "class_index": self.class_index,
            "normalized": self.normalized,
            "scale": self.scale,
        }


def _check_consistent(spec: CombinationSpec, group: ClassGroup) -> None:
    if spec.D is not None and spec.D != group.D:
        raise InvalidInputError(f"Combination built for D={spec.D}, not D={group.D}")
    if spec.J != group.J or list(spec.xi) != group.xi():
        raise InvalidInputError(
            f"Combination with J={spec.J}, xi={spec.xi} does not match D={group.D}"
        )


def combination_weights(spec: CombinationSpec, group: ClassGroup) -> tuple[np.ndarray, complex]:
    """Class weights and pole weight of F_J as a sum of class Epstein functions."""
    _check_consistent(spec, group)
    evaluator = hecke_evaluator(group)
    weights = np.zeros(group.h, dtype=complex)
    pole = 0.0j
    for coefficient, j in zip(spec.b, spec.characters):
        class_weights, class_pole = evaluator.character_weights(j)
        weights += coefficient * class_weights
        pole += coefficient * class_pole
    return weights, pole


def eval_F(  # pylint: disable=invalid-name
    spec: CombinationSpec,
    group: ClassGroup,
    s: complex,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> complex:
    """F_J(s) = sum_j b_j L_j(s)."""
    weights, pole = combination_weights(spec, group)
    return hecke_evaluator(group).brackets(s, tol).combine(weights, pole)


def completed(
    spec: CombinationSpec,
    group: ClassGroup,
    s: complex,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> complex:
    """G(s) = (sqrt|D| / 2 pi)^s Gamma(s) F_J(s)."""
    weights, pole = combination_weights(spec, group)
    return hecke_evaluator(group).brackets(s, tol).combine_completed(weights, pole)


def functional_residual(
    spec: CombinationSpec,
    group: ClassGroup,
    s: complex,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """|G(s) - G(1-s)| / max(|G(s)|, 1)."""
    s = complex(s)
    left = completed(spec, group, s, tol)
    right = completed(spec, group, 1.0 - s, tol)
    return abs(left - right) / max(abs(left), 1.0)


def evaluate_many(
    spec: CombinationSpec,
    group: ClassGroup,
    points: Iterable[complex],
    tol: Tolerance = DEFAULT_TOLERANCE,
    threads: int = 1,
) -> list[complex]:
    """Batched eval_F; results are in input order for any thread count."""
    points = [complex(point) for point in points]
    if threads <= 1:
        return [eval_F(spec, group, point, tol) for point in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda point: eval_F(spec, group, point, tol), points))


def direct_series(
    evaluator: EpsteinEvaluator, s: complex, limit: int = DIRECT_SERIES_LIMIT
) -> complex:
    """sum r_Q(n) n^-s for Re s > 1, with Abel-summed smooth tail."""
    s = complex(s)
    if s.real <= 1.0:
        raise InvalidInputError(f"Direct series needs Re s > 1, got {s}")
    values, counts = representation_counts(evaluator.form, limit)
    head = complex(np.sum(counts * np.exp(-s * np.log(values.astype(float)))))
    area = math.pi / math.sqrt(evaluator.delta)
    total_count = float(np.sum(counts))
    # N(x) ~ area*x - 1 (origin excluded)
    tail = -(limit ** -s) * (total_count + 1.0) + area * s * limit ** (1.0 - s) / (s - 1.0)
    return head + tail


def ideal_coefficients(group: ClassGroup, j: int, n_max: int) -> np.ndarray:
    """Dirichlet coefficients a(1..n_max) of L(s, chi_j) from ideal counts."""
    chars = group.chars[j]
    local: dict[tuple[int, int], complex] = {}
    coefficients = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        value = 1.0 + 0.0j
        for p, exp in factorint(n).items():
            if (p, exp) not in local:
                local[(p, exp)] = _local_coefficient(group, chars, p, exp)
            value *= local[(p, exp)]
        coefficients[n] = value.real
    return coefficients[1:]


def _local_coefficient(group: ClassGroup, chars: np.ndarray, p: int, exp: int) -> complex:
    split = splitting(group, p)
    if split.kind is SplitKind.INERT:
        return 1.0 if exp % 2 == 0 else 0.0
    first = chars[split.class_index]
    if split.kind is SplitKind.RAMIFIED:
        return first**exp
    second = chars[group.inverse(split.class_index)]
    return sum(first**i * second ** (exp - i) for i in range(exp + 1))
