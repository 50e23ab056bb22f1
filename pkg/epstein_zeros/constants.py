"""Library constants and defaults"""
from __future__ import annotations

from typing import Final

DEFAULT_REL_ERR: Final = 1e-12
DEFAULT_MAX_TERMS: Final = 10_000

# Lattice points with pi*Q(x) above this are dropped (tail below e^-40).
DEFAULT_LATTICE_CUTOFF: Final = 40.0
# Heights up to which evaluator lattices are precomputed.
DEFAULT_MAX_HEIGHT: Final = 60.0
DOUBLE_DIGITS: Final = 15
# Decimal digits lost per unit height in the continuation bracket (pi/2/ln 10).
DIGITS_PER_HEIGHT: Final = 0.6822
POLE_EXCLUSION: Final = 1e-8

DEFAULT_PRIME_CUTOFF: Final = 10**6
DEFAULT_SEED: Final = 0
DEFAULT_SAMPLES: Final = 10_000
EULER_LOG_TERMS: Final = 50
THETA_GRID: Final = 256

REAL_XI: Final = 4
NONREAL_XI: Final = 2

DEFAULT_REFINE_LIMIT: Final = 40
BOUNDARY_ZERO_FACTOR: Final = 1e-10
WINDING_INTEGRALITY: Final = 1e-6
NEWTON_BOX: Final = 0.05
NEWTON_TOL: Final = 1e-12
ZERO_RESIDUAL: Final = 1e-8
T_JITTER: Final = 1e-4
SIGMA_JITTER: Final = 1e-6
JITTER_RETRIES: Final = 5

SCHEMA_VERSION: Final = "1"
MANIFEST_FILE: Final = "manifests.jsonl"
CALIBRATION_FILE: Final = "calibration.json"

EXIT_OK: Final = 0
EXIT_FAILED: Final = 1
EXIT_NUMERIC: Final = 2
EXIT_INVALID: Final = 3
