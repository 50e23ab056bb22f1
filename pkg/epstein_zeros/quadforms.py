"""Binary quadratic forms, class groups and prime splitting."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import logging
import math
from typing import Any, Final

import numpy as np
from sympy import factorint, legendre_symbol, sqrt_mod

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from epstein_zeros.exceptions import (
    NonFundamentalDiscriminantError,
    NotPositiveDefiniteError,
    RepresentationNotFoundError,
    UnsupportedGroupError,
)
from epstein_zeros.util import is_very_verbose, primes_up_to

_LOGGER = logging.getLogger(__name__)

_SEARCH_FACTOR: Final = 4
_UNIT_ROOTS: Final = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@dataclass(frozen=True, order=True)
class QuadForm:
    """Integral binary quadratic form ax^2 + bxy + cy^2"""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def determinant(self) -> float:
        """Determinant of the Gram matrix, |D|/4."""
        return -self.discriminant / 4.0

    def __call__(self, m: Any, n: Any) -> Any:
        return self.a * m * m + self.b * m * n + self.c * n * n

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"

    def opposite(self) -> QuadForm:
        """Form (a,-b,c), the inverse class."""
        return QuadForm(self.a, -self.b, self.c)

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not abs(b) <= a <= c:
            return False
        if b < 0 and (-b == a or a == c):
            return False
        return True

    def min_eigenvalue(self) -> float:
        half = (self.a + self.c) / 2.0
        return half - math.hypot((self.a - self.c) / 2.0, self.b / 2.0)


class SplitKind(Enum):
    """Decomposition type of a rational prime"""

    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


@dataclass(frozen=True)
class PrimeSplit:
    """Splitting of rational prime p in the field"""

    p: int
    kind: SplitKind
    class_index: int | None = None


def _check_definite(form: QuadForm) -> None:
    if form.a <= 0 or form.discriminant >= 0:
        raise NotPositiveDefiniteError(
            f"Form {form} is not positive definite (D={form.discriminant})"
        )


def _normalize(a: int, b: int, c: int) -> tuple[int, int, int]:
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def reduce(form: QuadForm) -> QuadForm:
    """Returns the unique reduced form equivalent to the given form."""
    _check_definite(form)
    a, b, c = _normalize(form.a, form.b, form.c)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize(c, -b, a)
    return QuadForm(a, b, c)


def is_fundamental(disc: int) -> bool:
    """Checks that disc is a negative fundamental discriminant."""
    if disc >= 0:
        return False
    if disc % 4 == 1:
        return _squarefree(-disc)
    if disc % 4 == 0:
        m = disc // 4
        return m % 4 in (2, 3) and _squarefree(-m)
    return False


def _squarefree(n: int) -> bool:
    return all(exp == 1 for exp in factorint(n).values())


def kronecker_symbol(disc: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 1."""
    if n < 1:
        raise ValueError(f"Kronecker symbol needs positive n, got {n}")
    result = 1
    for p, exp in factorint(n).items():
        if p == 2:
            if disc % 2 == 0:
                return 0
            value = 1 if disc % 8 in (1, 7) else -1
        elif disc % p == 0:
            return 0
        else:
            value = legendre_symbol(disc % p, p)
        result *= value**exp
    return result


def compose_forms(first: QuadForm, second: QuadForm) -> QuadForm:
    """Dirichlet composition of two forms of the same discriminant, reduced."""
    disc = first.discriminant
    if second.discriminant != disc:
        raise ValueError(f"Discriminants differ: {first} and {second}")
    if first.a > second.a:
        first, second = second, first
    a1, b1 = first.a, first.b
    a2, b2, c2 = second.a, second.b, second.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        u, _, d = igcdex(a2, a1)
        y1 = u
    if s % d == 0:
        x2, y2, d1 = 0, -1, d
    else:
        x2, y2, d1 = igcdex(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - disc) // (4 * a3)
    return reduce(QuadForm(int(a3), int(b3), int(c3)))


def _reduced_forms(disc: int) -> list[QuadForm]:
    forms = []
    bound = math.isqrt(-disc // 3)
    for a in range(1, bound + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            numerator = b * b - disc
            if numerator % (4 * a):
                continue
            form = QuadForm(a, b, numerator // (4 * a))
            if form.is_reduced() and math.gcd(math.gcd(a, b), form.c) == 1:
                forms.append(form)
    forms.sort(key=lambda f: (f.a, abs(f.b), -f.b))
    return forms


def _unit_root(numerator: int, order: int) -> complex:
    numerator %= order
    if (4 * numerator) % order == 0:
        return _UNIT_ROOTS[4 * numerator // order]
    angle = 2.0 * math.pi * numerator / order
    return complex(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class ClassGroup:  # pylint: disable=too-many-instance-attributes
    """Form class group of a negative fundamental discriminant"""

    D: int  # pylint: disable=invalid-name
    forms: tuple[QuadForm, ...]
    w: int
    table: np.ndarray = field(repr=False, compare=False)
    exponents: tuple[int, ...] = field(repr=False, compare=False)
    chars: np.ndarray = field(repr=False, compare=False)

    @property
    def h(self) -> int:  # pylint: disable=invalid-name
        return len(self.forms)

    @property
    def generator(self) -> int:
        return self.exponents.index(1) if self.h > 1 else 0

    def index_of(self, form: QuadForm) -> int:
        return self.forms.index(reduce(form))

    def compose(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inverse(self, i: int) -> int:
        return self.index_of(self.forms[i].opposite())

    def order(self, i: int) -> int:
        return self.h // math.gcd(self.h, self.exponents[i])

    def is_real(self, j: int) -> bool:
        """Character j is real valued."""
        return (2 * j) % self.h == 0

    def merged_characters(self) -> list[int]:
        """Character representatives with conjugate pairs merged, j <= h/2."""
        return list(range(self.h // 2 + 1))

    @property
    def J(self) -> int:  # pylint: disable=invalid-name
        return len(self.merged_characters())

    def xi(self) -> list[int]:
        """Variance weights: 4 for real, 2 for nonreal characters."""
        return [4 if self.is_real(j) else 2 for j in self.merged_characters()]

    def to_json(self) -> dict[str, Any]:
        return {
            "D": self.D,
            "h": self.h,
            "w": self.w,
            "forms": [list(form) for form in self.forms],
            "chars": [
                [{"re": float(z.real), "im": float(z.imag)} for z in row]
                for row in self.chars
            ],
        }


def compose(group: ClassGroup, i: int, j: int) -> int:
    """Group law on class indices."""
    if not (0 <= i < group.h and 0 <= j < group.h):
        raise IndexError(f"Class index out of range for h={group.h}: {i}, {j}")
    return group.compose(i, j)


def _roots_of_unity(disc: int) -> int:
    if disc == -3:
        return 6
    if disc == -4:
        return 4
    return 2


@lru_cache(maxsize=64)
def class_group(disc: int) -> ClassGroup:
    """Enumerates the class group of fundamental discriminant disc."""
    if not is_fundamental(disc):
        raise NonFundamentalDiscriminantError(
            f"{disc} is not a negative fundamental discriminant"
        )
    forms = _reduced_forms(disc)
    h = len(forms)
    positions = {form: k for k, form in enumerate(forms)}
    table = np.zeros((h, h), dtype=np.int64)
    for i in range(h):
        for j in range(i, h):
            k = positions[compose_forms(forms[i], forms[j])]
            table[i, j] = table[j, i] = k

    exponents = [0] * h
    generator = None
    for candidate in range(h):
        power, seen = 0, [0]
        while True:
            power = int(table[power, candidate])
            if power == 0:
                break
            seen.append(power)
        if len(seen) == h:
            generator = candidate
            for exponent, k in enumerate(seen):
                exponents[k] = exponent
            break
    if generator is None:
        raise UnsupportedGroupError(
            f"Class group of D={disc} (h={h}) is not cyclic"
        )

    chars = np.array(
        [[_unit_root(j * exponents[k], h) for k in range(h)] for j in range(h)],
        dtype=complex,
    )
    _LOGGER.debug("D=%d h=%d generator=%s forms=%s", disc, h, forms[generator], forms)
    return ClassGroup(
        D=disc,
        forms=tuple(forms),
        w=_roots_of_unity(disc),
        table=table,
        exponents=tuple(exponents),
        chars=chars,
    )


def splitting(group: ClassGroup, p: int, search_bound: int | None = None) -> PrimeSplit:
    """Splitting type of p and a class whose reduced form represents p."""
    symbol = kronecker_symbol(group.D, p)
    if symbol == -1:
        return PrimeSplit(p, SplitKind.INERT)
    kind = SplitKind.SPLIT if symbol == 1 else SplitKind.RAMIFIED
    bound = search_bound or math.ceil(_SEARCH_FACTOR * math.sqrt(p))
    grid = np.arange(-bound, bound + 1, dtype=np.int64)
    m, n = np.meshgrid(grid, grid, indexing="ij")
    for index, form in enumerate(group.forms):
        if np.any(form(m, n) == p):
            return PrimeSplit(p, kind, index)
    raise RepresentationNotFoundError(
        f"No reduced form of D={group.D} represents {p} with |m|,|n| <= {bound}",
        p,
    )


def _prime_form(disc: int, p: int) -> QuadForm:
    """Form (p, b, c) of discriminant disc, p split or ramified."""
    if p == 2:
        b = next(b for b in range(4) if (b - disc) % 2 == 0 and (b * b - disc) % 8 == 0)
    elif disc % p == 0:
        b = p if disc % 2 else 0
    else:
        b = int(sqrt_mod(disc % p, p))
        if (b - disc) % 2:
            b = p - b
    return QuadForm(p, b, (b * b - disc) // (4 * p))


@dataclass(frozen=True)
class PrimeTable:
    """Bulk classification of primes up to a cutoff"""

    D: int  # pylint: disable=invalid-name
    limit: int
    primes: np.ndarray
    kinds: np.ndarray
    classes: np.ndarray

    KIND_CODES = {SplitKind.SPLIT: 1, SplitKind.INERT: -1, SplitKind.RAMIFIED: 0}

    def split_at(self, position: int) -> PrimeSplit:
        code = int(self.kinds[position])
        kind = next(k for k, v in self.KIND_CODES.items() if v == code)
        index = int(self.classes[position])
        return PrimeSplit(int(self.primes[position]), kind, None if index < 0 else index)


@lru_cache(maxsize=16)
def classify_primes(group: ClassGroup, limit: int) -> PrimeTable:
    """Classifies all primes up to limit; same class choice as splitting()."""
    primes = primes_up_to(limit)
    kinds = np.zeros(primes.shape, dtype=np.int8)
    classes = np.full(primes.shape, -1, dtype=np.int64)
    disc = group.D
    positions = {form: k for k, form in enumerate(group.forms)}
    for position, p in enumerate(primes.tolist()):
        symbol = kronecker_symbol(disc, p) if p == 2 else _legendre(disc, p)
        kinds[position] = symbol
        if symbol == -1:
            continue
        index = positions[reduce(_prime_form(disc, p))]
        classes[position] = min(index, group.inverse(index))
        if is_very_verbose():
            _LOGGER.debug("p=%d kind=%d class=%d", p, symbol, classes[position])
    _LOGGER.debug("Classified %d primes up to %d for D=%d", len(primes), limit, disc)
    return PrimeTable(disc, limit, primes, kinds, classes)


def _legendre(disc: int, p: int) -> int:
    residue = disc % p
    return 0 if residue == 0 else legendre_symbol(residue, p)


def representation_counts(form: QuadForm, limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Values 0 < Q(m,n) <= limit with their multiplicities r_Q(value)."""
    _check_definite(form)
    bound = math.isqrt(int(limit / form.min_eigenvalue())) + 1
    rows = []
    for m in range(-bound, bound + 1):
        # c n^2 + b m n + a m^2 - limit <= 0
        disc_row = (form.b * m) ** 2 - 4 * form.c * (form.a * m * m - limit)
        if disc_row < 0:
            continue
        root = math.sqrt(disc_row)
        low = math.floor((-form.b * m - root) / (2 * form.c))
        high = math.ceil((-form.b * m + root) / (2 * form.c))
        n = np.arange(low, high + 1, dtype=np.int64)
        values = form(m, n)
        keep = (values <= limit) & (values > 0)
        rows.append(values[keep])
    if not rows:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(rows), return_counts=True)
