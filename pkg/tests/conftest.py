"""Fixtures and setup for tests."""
import logging

import pytest
from pytest_socket import disable_socket

from epstein_zeros.quadforms import ClassGroup, class_group
from epstein_zeros.special import Tolerance
from epstein_zeros.util import very_verbose
from epstein_zeros.zeroscan import ScanTarget

# pylint: disable=missing-function-docstring


def pytest_runtest_setup():
    disable_socket()


@pytest.fixture(autouse=True)
def log_warning(caplog):
    """Automatically set log level to WARNING"""
    caplog.set_level(logging.WARNING)


@pytest.fixture(name="group15")
def group15() -> ClassGroup:
    """Class group of D = -15 (h = 2, two real characters)"""
    return class_group(-15)


@pytest.fixture(name="group23")
def group23() -> ClassGroup:
    """Class group of D = -23 (h = 3, one nonreal character pair)"""
    return class_group(-23)


@pytest.fixture(name="two_roots")
def two_roots() -> ScanTarget:
    """Quadratic with simple zeros at 0.6 + 10i and 0.8 + 12i"""
    return ScanTarget.from_callable(
        lambda s: (s - (0.6 + 10j)) * (s - (0.8 + 12j)),
        label="two roots",
        free_abscissa=1.5,
    )


@pytest.fixture(name="tol")
def tol() -> Tolerance:
    return Tolerance(1e-10)


@pytest.fixture(autouse=True)
def clean_logging_setup_state():
    very_verbose(False)
    yield
    very_verbose(False)
