""" Zeros of Epstein zeta functions of binary quadratic forms and the random
Euler product model of their Hecke L-function decompositions """
from __future__ import annotations

import logging

from epstein_zeros.asymptotics import MainTermParams, main_term_report
from epstein_zeros.epstein import (
    CombinationSpec,
    completed,
    eval_epstein,
    eval_F,
    eval_hecke,
    epstein_evaluator,
)
from epstein_zeros.quadforms import ClassGroup, QuadForm, class_group, reduce
from epstein_zeros.randmodel import build_instance, mc_estimate
from epstein_zeros.special import Tolerance
import epstein_zeros.version as version
from epstein_zeros.zeroscan import (
    Rectangle,
    ScanTarget,
    count_above,
    littlewood_check,
    locate_zeros,
    winding_number,
)

__all__ = (
    "build_instance",
    "class_group",
    "ClassGroup",
    "CombinationSpec",
    "completed",
    "count_above",
    "epstein_evaluator",
    "eval_epstein",
    "eval_F",
    "eval_hecke",
    "littlewood_check",
    "locate_zeros",
    "main_term_report",
    "MainTermParams",
    "mc_estimate",
    "QuadForm",
    "Rectangle",
    "reduce",
    "ScanTarget",
    "Tolerance",
    "winding_number",
)

__version__ = version.__version__


_LOGGER = logging.getLogger(__name__)
