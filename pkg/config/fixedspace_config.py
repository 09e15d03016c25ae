"""
Configuration for the fixed-space analysis toolkit.
"""

from typing import Dict, Any, Optional

from var.vars import (
    TOL_RANK, TOL_FIXED, TOL_SPEC, TOL_CERT, SEED, SAMPLES, LOG_LEVEL as ENV_LOG_LEVEL
)

# Tool metadata
TOOL_NAME = "fixedspace"
TOOL_VERSION = "1.0.0"
SCHEMA_VERSION = 1

# Tolerance defaults
DEFAULT_TOLERANCES = {
    "tol_rank": 1e-9,    # relative singular-value cutoff
    "tol_fixed": 1e-8,   # fixed-point residual
    "tol_spec": 1e-7,    # eigenvalue clustering width
    "tol_cert": 1e-6     # structure-residual acceptance
}

# Every tolerance must sit strictly inside (0, MAX_TOLERANCE)
MAX_TOLERANCE = 1e-2

# Environment overrides, applied on top of the defaults
ENV_TOLERANCES = {
    "tol_rank": TOL_RANK,
    "tol_fixed": TOL_FIXED,
    "tol_spec": TOL_SPEC,
    "tol_cert": TOL_CERT
}

# Representation checks
REPRESENTATION_TOL = 1e-10
ISOMETRY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
SVD_RECONSTRUCTION_TOL = 1e-12

# Eigenvalues of a PTP natural matrix lie in the closed unit disc
SPECTRAL_NORM_GATE = 1.0 + 1e-8

# Cesaro cross-check
CESARO_MAX_TERMS = 2 ** 22

# Randomness
DEFAULT_SEED = int(SEED) if SEED else 0
DEFAULT_SAMPLES = int(SAMPLES) if SAMPLES else 200
FALSIFIER_SAMPLES = 10000

# Report status values and their exit codes
STATUS_CERTIFIED = "Certified"
STATUS_UNDETERMINED = "Undetermined"
STATUS_INCONSISTENT = "Inconsistent"

EXIT_CODES = {
    STATUS_CERTIFIED: 0,
    "input_error": 1,
    STATUS_UNDETERMINED: 2,
    STATUS_INCONSISTENT: 3
}

# Cross-block case kinds
CASE_ZERO = "Zero"
CASE_HALF = "Half"
CASE_PARTITION = "Partition"

# Lemma verdict values
VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_SKIPPED = "skipped"

# Generator kinds accepted by the zoo
ZOO_KINDS = [
    "depolarizing", "dephasing", "amplitude_damping", "unitary", "transpose",
    "symmetrizer", "conditional_expectation", "spec_case", "random_cptp",
    "structured_cptp"
]

# Error messages
ERROR_MESSAGES = {
    "shape_mismatch": "Shape mismatch in {representation}: expected {expected}, got {actual}",
    "non_finite": "Non-finite entries in {representation}",
    "not_hermitian": "Operator is not Hermitian within tolerance (residual {residual:.3e})",
    "svd_failed": "SVD did not converge for a {rows}x{cols} matrix",
    "eig_failed": "Eigendecomposition did not converge for a {rows}x{cols} matrix",
    "boundary_direction": "Direction does not decrease the minimum eigenvalue (lambda_max {value:.3e})",
    "boundary_input": "Invalid boundary step input: {reason}",
    "empty_fixed_space": "Trace-preserving map has an empty fixed space",
    "singular_pairing": "Left/right eigenvalue-1 spaces are not paired (sigma_min {value:.3e})",
    "cesaro_not_converged": "Cesaro mean did not converge after {terms} terms (residual {residual:.3e})",
    "not_positive": "Image of the identity is not positive semi-definite (lambda_min {value:.3e})",
    "not_invariant": "Subspace operator space is not invariant: basis element {index} leaks {residual:.3e}",
    "rank_stalled": "Boundary step did not reduce the rank (rank {rank})",
    "no_direction": "No usable direction among {count} Hermitian fixed points",
    "not_cp": "Map is not completely positive; use the positive-map structure path",
    "invalid_parameter": "Invalid parameter {name}: {reason}",
    "unknown_kind": "Unknown generator kind: {kind}",
    "malformed_json": "Malformed channel file at line {line} column {column}: {reason}",
    "invalid_channel": "Invalid channel file: {reason}",
    "dimension_mismatch": "Dimension mismatch: {reason}",
    "dimension_law": "Fixed-space dimension {actual} does not match the form prediction {expected}"
}

# Logging configuration
LOG_LEVEL = ENV_LOG_LEVEL or "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def get_default_tolerances() -> Dict[str, float]:
    """Get default tolerances with environment overrides applied."""
    tolerances = dict(DEFAULT_TOLERANCES)
    for name, value in ENV_TOLERANCES.items():
        if value:
            tolerances[name] = float(value)
    return tolerances


def get_exit_code(status: str) -> int:
    """Get the process exit code for a report status."""
    return EXIT_CODES.get(status, EXIT_CODES[STATUS_INCONSISTENT])


def get_error_message(key: str, **kwargs: Any) -> str:
    """Format an error message template."""
    template = ERROR_MESSAGES.get(key, key)
    return template.format(**kwargs) if kwargs else template


def get_seed(seed: Optional[int] = None) -> int:
    """Resolve a seed, falling back to the configured default."""
    return DEFAULT_SEED if seed is None else int(seed)
