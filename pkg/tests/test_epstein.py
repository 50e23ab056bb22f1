"""Test Epstein zeta and Hecke L-function evaluation"""
import math

import mpmath
import numpy as np
import pytest

from epstein_zeros.epstein import (
    CombinationSpec,
    combination_weights,
    completed,
    direct_series,
    epstein_evaluator,
    eval_epstein,
    eval_F,
    eval_hecke,
    eval_hecke_all,
    evaluate_many,
    functional_residual,
    ideal_coefficients,
)
from epstein_zeros.exceptions import (
    InvalidInputError,
    PoleAtOneError,
    UnsupportedCombinationError,
)
from epstein_zeros.quadforms import QuadForm, class_group, kronecker_symbol
from epstein_zeros.special import Tolerance

# pylint: disable=missing-function-docstring
# pylint: disable=invalid-name

SQUARES = QuadForm(1, 0, 1)


def _kronecker_table(disc: int, modulus: int) -> list:
    return [0] + [kronecker_symbol(disc, n) for n in range(1, modulus)]


def _gaussian_epstein(s: complex) -> complex:
    """E(s, x^2 + y^2) = 4 zeta(s) beta(s)."""
    return complex(4 * mpmath.zeta(s) * mpmath.dirichlet(s, [0, 1, 0, -1]))


def test_sum_of_two_squares_at_two() -> None:
    expected = float(4 * mpmath.zeta(2) * mpmath.catalan)
    assert eval_epstein(epstein_evaluator(SQUARES), 2.0) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("s", [0.3 + 4.0j, 0.5 + 14.0j, -1.5 + 2.0j, 2.0 - 7.0j])
def test_sum_of_two_squares_continuation(s: complex) -> None:
    value = eval_epstein(epstein_evaluator(SQUARES), s)
    expected = _gaussian_epstein(s)
    assert abs(value - expected) <= 1e-10 * abs(expected)


def test_multiprecision_height() -> None:
    s = 0.5 + 30.0j
    value = eval_epstein(epstein_evaluator(SQUARES), s, Tolerance(1e-12))
    expected = _gaussian_epstein(s)
    assert abs(value - expected) <= 1e-9 * abs(expected)


@pytest.mark.parametrize("disc", [-3, -4, -15, -23])
def test_pole_residue(disc: int) -> None:
    expected = 2.0 * math.pi / math.sqrt(-disc)
    for form in class_group(disc).forms:
        value = 1e-6 * eval_epstein(epstein_evaluator(form), 1.0 + 1e-6)
        assert value == pytest.approx(expected, rel=1e-4)


def test_dedekind_zeta(group15) -> None:
    s = 0.7 + 3.0j
    expected = complex(mpmath.zeta(s) * mpmath.dirichlet(s, _kronecker_table(-15, 15)))
    value = eval_hecke(group15, 0, s)
    assert abs(value - expected) <= 1e-10 * abs(expected)


def test_genus_character_factorization(group15) -> None:
    """L(s, chi_1) of D = -15 splits into L(s, (-3/.)) L(s, (5/.))."""
    for s in (0.4 + 6.0j, 1.0, 2.5):
        expected = complex(
            mpmath.dirichlet(s, [0, 1, -1]) * mpmath.dirichlet(s, [0, 1, -1, -1, 1])
        )
        assert abs(eval_hecke(group15, 1, s) - expected) <= 1e-10 * abs(expected)


def test_hecke_index_out_of_range(group15) -> None:
    with pytest.raises(InvalidInputError):
        eval_hecke(group15, 2, 2.0)


def test_class_functions_from_hecke_values(group23) -> None:
    s = 0.25 + 5.0j
    values = eval_hecke_all(group23, s)
    for index, form in enumerate(group23.forms):
        rebuilt = group23.w / group23.h * np.sum(np.conj(group23.chars[:, index]) * values)
        direct = eval_epstein(epstein_evaluator(form), s)
        assert abs(rebuilt - direct) <= 1e-11 * abs(direct)


def test_from_class(group23) -> None:
    spec = CombinationSpec.from_class(group23, 0)
    assert spec.J == 2
    assert spec.xi == (4, 2)
    assert spec.b[0] == pytest.approx(2.0 / 3.0)
    assert spec.b[1] == pytest.approx(4.0 / 3.0)
    assert spec.has_pole
    assert spec.xi_product == 8
    other = CombinationSpec.from_class(group23, 1)
    assert other.b[1] == pytest.approx(-2.0 / 3.0)


@pytest.mark.parametrize("index", [0, 1, 2])
def test_combination_is_class_function(group23, index: int) -> None:
    spec = CombinationSpec.from_class(group23, index)
    s = 0.6 + 8.0j
    direct = eval_epstein(epstein_evaluator(group23.forms[index]), s)
    assert abs(eval_F(spec, group23, s) - direct) <= 1e-11 * abs(direct)


def test_class_weights(group23) -> None:
    spec = CombinationSpec.from_class(group23, 2)
    weights, pole = combination_weights(spec, group23)
    # E_1 = E_2 as functions: opposite forms take the same values
    assert abs(weights[0]) < 1e-12
    assert weights[1] + weights[2] == pytest.approx(1.0)
    assert pole == pytest.approx(1.0)


def test_normalize(group15) -> None:
    spec = CombinationSpec.from_class(group15, 0)
    normal = spec.normalize()
    assert normal.normalized
    assert sum(abs(b) ** 2 for b in normal.b) == pytest.approx(1.0)
    s = 0.5 + 9.0j
    assert eval_F(normal, group15, s) == pytest.approx(
        eval_F(spec, group15, s) * normal.scale / spec.scale, rel=1e-12
    )


def test_from_coefficients(group15) -> None:
    spec = CombinationSpec.from_coefficients([1.0, 0.5], group=group15)
    assert spec.characters == (0, 1)
    assert spec.D == -15
    with pytest.raises(InvalidInputError):
        CombinationSpec.from_coefficients([1.0], group=group15)
    with pytest.raises(InvalidInputError):
        CombinationSpec.from_coefficients([1.0, 1.0])
    with pytest.raises(UnsupportedCombinationError):
        CombinationSpec.from_coefficients([1.0, 0.0], group=group15)
    with pytest.raises(InvalidInputError):
        CombinationSpec.from_coefficients([1.0, 1.0], xi=[4, 3])


def test_group_mismatch(group15, group23) -> None:
    spec = CombinationSpec.from_class(group15, 0)
    with pytest.raises(InvalidInputError):
        eval_F(spec, group23, 2.0)


def test_pole_at_one(group15) -> None:
    spec = CombinationSpec.from_class(group15, 0)
    with pytest.raises(PoleAtOneError):
        eval_F(spec, group15, 1.0)
    assert abs(eval_hecke(group15, 1, 1.0)) > 0.2


@pytest.mark.parametrize("rel_err", [1e-13, 1e-16])
def test_poles_at_tight_tolerance(group15, rel_err: float) -> None:
    tol = Tolerance(rel_err)
    expected = eval_hecke(group15, 1, 1.0)
    assert eval_hecke(group15, 1, 1.0, tol) == pytest.approx(expected, rel=1e-9)
    # E(0, Q) = -1 for every form
    value = eval_epstein(epstein_evaluator(QuadForm(1, 1, 4)), 0.0, tol)
    assert value == pytest.approx(-1.0, abs=1e-10)
    spec = CombinationSpec.from_class(group15, 0)
    with pytest.raises(PoleAtOneError):
        eval_F(spec, group15, 1.0, tol)


@pytest.mark.parametrize("s", [0.3 + 5.0j, -0.8 - 2.0j, 1.7 + 11.0j])
def test_functional_equation(group23, s: complex) -> None:
    spec = CombinationSpec.from_class(group23, 1)
    assert functional_residual(spec, group23, s) <= 1e-9
    assert completed(spec, group23, s) == pytest.approx(
        completed(spec, group23, 1.0 - s), rel=1e-9
    )


def test_evaluate_many_thread_invariant(group15) -> None:
    spec = CombinationSpec.from_class(group15, 1)
    points = [0.5 + 1.0j * t for t in range(2, 10)]
    assert evaluate_many(spec, group15, points, threads=1) == evaluate_many(
        spec, group15, points, threads=3
    )


def test_direct_series() -> None:
    evaluator = epstein_evaluator(SQUARES)
    s = 2.5 + 3.0j
    assert abs(direct_series(evaluator, s, 200_000) - eval_epstein(evaluator, s)) <= 1e-9
    with pytest.raises(InvalidInputError):
        direct_series(evaluator, 1.0 + 2.0j)


def test_ideal_coefficients(group15) -> None:
    coefficients = ideal_coefficients(group15, 0, 30)
    for n in range(1, 31):
        expected = sum(
            kronecker_symbol(-15, d) for d in range(1, n + 1) if n % d == 0
        )
        assert coefficients[n - 1] == pytest.approx(expected)


def test_ideal_coefficients_gaussian() -> None:
    group = class_group(-4)
    coefficients = ideal_coefficients(group, 0, 25)
    assert coefficients[0] == pytest.approx(1.0)
    assert coefficients[4] == pytest.approx(2.0)  # r(5) / 4
    assert coefficients[24] == pytest.approx(3.0)  # r(25) / 4
    assert coefficients[2] == pytest.approx(0.0)


def test_spec_json(group23) -> None:
    data = CombinationSpec.from_class(group23, 0, normalize=True).to_json()
    assert data["J"] == 2
    assert data["xi"] == [4, 2]
    assert data["normalized"]
