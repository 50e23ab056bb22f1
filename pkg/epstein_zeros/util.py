"""Utility services for Epstein zeta library."""
from __future__ import annotations

from functools import lru_cache
import math
from typing import Any, Iterable

import numpy as np
from sympy import primerange

_very_verbose: bool = False


# pylint: disable=global-statement,invalid-name
def is_very_verbose() -> bool:
    """Checks if very verbose mode is active."""
    global _very_verbose
    return _very_verbose


def very_verbose(verbose: bool) -> None:
    """Activates/deactivates very verbose mode."""
    global _very_verbose
    _very_verbose = verbose
# pylint: enable=global-statement,invalid-name


def parse_complex(text: str) -> complex:
    """Parses complex number given as "re,im", "re" or Python literal "a+bj"."""
    text = str(text).strip()
    if "," in text:
        real, imag = text.split(",", 1)
        return complex(float(real), float(imag))
    return complex(text.replace(" ", "").replace("i", "j"))


def parse_vector(text: str, kind: Any = float) -> list:
    """Parses comma separated vector, e.g. "4,2,2"."""
    return [kind(item) for item in str(text).split(",") if item.strip()]


def complex_json(value: complex) -> dict[str, float]:
    """JSON form of a complex number."""
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def complex_list_json(values: Iterable[complex]) -> list[dict[str, float]]:
    return [complex_json(value) for value in values]


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> np.ndarray:
    """All rational primes p <= limit as int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    return np.fromiter(primerange(2, int(limit) + 1), dtype=np.int64)


def sigma_T(theta: float, height: float) -> float:  # pylint: disable=invalid-name
    """Abscissa 1/2 + (log T)^-theta."""
    return 0.5 + math.log(height) ** (-theta)


def loglog(height: float) -> float:
    return math.log(math.log(height))


def pairwise_sum(values: np.ndarray) -> np.ndarray:
    """Fixed-order pairwise tree sum over the last axis."""
    length = values.shape[-1]
    if length == 0:
        return np.zeros(values.shape[:-1], dtype=values.dtype)
    width = 1 << (length - 1).bit_length()
    padded = np.zeros(values.shape[:-1] + (width,), dtype=values.dtype)
    padded[..., :length] = values
    while width > 1:
        width //= 2
        padded = padded[..., :width] + padded[..., width:]
    return padded[..., 0]
