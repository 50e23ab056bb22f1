"""Test special functions"""
import math
import threading

import mpmath
import pytest

from epstein_zeros.exceptions import PoleOfGammaError
from epstein_zeros.special import (
    Tolerance,
    height_loss,
    log_gamma,
    mp_context,
    needs_multiprecision,
    required_digits,
    rgamma,
    upper_gamma,
)

# pylint: disable=missing-function-docstring


@pytest.mark.parametrize("x", [0.1, 0.5, 2.0, 10.0, 40.0])
def test_upper_gamma_exponential(x: float) -> None:
    assert upper_gamma(1.0, x) == pytest.approx(math.exp(-x), rel=1e-13)


@pytest.mark.parametrize("x", [0.2, 1.0, 5.0])
def test_upper_gamma_half(x: float) -> None:
    expected = math.sqrt(math.pi) * math.erfc(math.sqrt(x))
    assert upper_gamma(0.5, x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    "s,x",
    [
        (2.5 + 3.0j, 0.7),
        (0.25 + 10.0j, 3.0),
        (-1.3 + 2.0j, 0.4),
        (-2.7 - 5.0j, 9.0),
        (0.1 + 0.0j, 0.3),
        (-0.5 + 20.0j, 1.5),
    ],
)
def test_upper_gamma_against_mpmath(s: complex, x: float) -> None:
    expected = complex(mpmath.gammainc(s, a=x))
    assert abs(upper_gamma(s, x) - expected) <= 1e-10 * abs(expected)


def test_upper_gamma_order_zero() -> None:
    assert upper_gamma(0.0, 0.5).real == pytest.approx(0.5597735947761608, rel=1e-13)


def test_upper_gamma_rejects_nonpositive_x() -> None:
    with pytest.raises(ValueError):
        upper_gamma(1.0, 0.0)


def test_log_gamma_pole() -> None:
    with pytest.raises(PoleOfGammaError):
        log_gamma(0.0)
    with pytest.raises(PoleOfGammaError):
        log_gamma(-2.0)
    assert log_gamma(5.0) == pytest.approx(math.log(24.0))
    assert abs(rgamma(-2.0)) < 1e-300


def test_tolerance() -> None:
    with pytest.raises(ValueError):
        Tolerance(0.0)
    with pytest.raises(ValueError):
        Tolerance(1e-8, max_terms=0)
    assert Tolerance(1e-8).tightened().rel_err == pytest.approx(1e-9)


def test_precision_tiers() -> None:
    assert required_digits(1e-12, 0.0) == 15
    assert not needs_multiprecision(1e-12, 0.0)
    assert required_digits(1e-12, 10.0) == 22
    assert needs_multiprecision(1e-12, 10.0)
    assert not needs_multiprecision(1e-12, 2.0)
    assert needs_multiprecision(1e-12, 3.0)
    assert not needs_multiprecision(1e-13, 0.0)
    assert needs_multiprecision(1e-16, 0.0)
    assert height_loss(-2.0) == 2


def test_mp_context_thread_local() -> None:
    contexts = []

    def grab() -> None:
        contexts.append(mp_context(30))

    worker = threading.Thread(target=grab)
    worker.start()
    worker.join()
    local = mp_context(20)
    assert local.dps == 20
    assert contexts[0] is not local
    assert contexts[0].dps == 30
