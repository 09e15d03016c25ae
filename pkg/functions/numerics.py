"""
Dense complex-matrix primitives and the tolerance policy.

All functions are pure: they never modify their inputs and keep no state.
Rank decisions use a cutoff relative to max(sigma_max, 1), so the zero
matrix and matrices that vanish up to roundoff have rank 0.
"""

import logging
from typing import List, Tuple, Optional

import numpy as np
import scipy.linalg
from pydantic import ValidationError

from config.fixedspace_config import HERMITIAN_TOL, get_default_tolerances
from functions.exceptions import ContractViolation, InputError, NumericalFailure
from models.report_models import TolerancePolicy

logger = logging.getLogger(__name__)


def get_tolerance_policy(**overrides: Optional[float]) -> TolerancePolicy:
    """
    Build a tolerance policy from defaults, environment and explicit overrides.

    Args:
        **overrides: tol_rank, tol_fixed, tol_spec, tol_cert; None means "keep default"

    Returns:
        Validated TolerancePolicy
    """
    values = get_default_tolerances()
    values.update({name: value for name, value in overrides.items() if value is not None})
    try:
        return TolerancePolicy(**values)
    except ValidationError as e:
        reason = "; ".join(error["msg"] for error in e.errors())
        raise InputError.from_template("invalid_parameter", name="tolerance", reason=reason)


def as_cmatrix(value, name: str = "matrix") -> np.ndarray:
    """Convert to a finite 2-D complex array or raise an input error."""
    array = np.asarray(value, dtype=complex)
    if array.ndim != 2:
        raise InputError.from_template(
            "shape_mismatch", representation=name, expected="a 2-D matrix", actual=array.shape
        )
    if not np.all(np.isfinite(array)):
        raise InputError.from_template("non_finite", representation=name)
    return array


def vec(mu: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(mu).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of vec for a dim x dim operator."""
    return np.asarray(v).reshape(dim, dim, order="F")


def svd(M) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Thin singular value decomposition M = U diag(s) V*.

    Args:
        M: finite complex matrix

    Returns:
        (U, s, V) with s descending and U, V having orthonormal columns
    """
    M = as_cmatrix(M)
    rows, cols = M.shape
    if M.size == 0:
        k = min(rows, cols)
        return np.zeros((rows, k), dtype=complex), np.zeros(k), np.zeros((cols, k), dtype=complex)
    try:
        U, s, Vh = scipy.linalg.svd(M, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.debug(f"gesdd did not converge on a {rows}x{cols} matrix, retrying with gesvd")
        try:
            U, s, Vh = scipy.linalg.svd(M, full_matrices=False, lapack_driver="gesvd")
        except np.linalg.LinAlgError:
            raise NumericalFailure.from_template("svd_failed", rows=rows, cols=cols)
    return U, s, Vh.conj().T


def singular_values(M) -> np.ndarray:
    """Singular values of M, descending."""
    M = as_cmatrix(M)
    if M.size == 0:
        return np.zeros(0)
    try:
        return scipy.linalg.svdvals(M)
    except np.linalg.LinAlgError:
        raise NumericalFailure.from_template("svd_failed", rows=M.shape[0], cols=M.shape[1])


def hermitian_eig(H) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (H + H*)/2 before factoring.

    Args:
        H: square matrix with ||H - H*||_F <= 1e-10 ||H||_F

    Returns:
        (eigenvalues descending, eigenvectors as columns)
    """
    H = as_cmatrix(H)
    if H.shape[0] != H.shape[1]:
        raise ContractViolation.from_template(
            "shape_mismatch", representation="Hermitian operator", expected="square", actual=H.shape
        )
    residual = float(np.linalg.norm(H - H.conj().T))
    if residual > HERMITIAN_TOL * float(np.linalg.norm(H)):
        raise ContractViolation.from_template("not_hermitian", residual=residual)
    H = (H + H.conj().T) / 2
    try:
        values, vectors = scipy.linalg.eigh(H)
    except np.linalg.LinAlgError:
        raise NumericalFailure.from_template("eig_failed", rows=H.shape[0], cols=H.shape[1])
    return values[::-1], vectors[:, ::-1]


def _relative_rank(s: np.ndarray, policy: TolerancePolicy) -> int:
    if s.size == 0:
        return 0
    # sigma_max is floored at 1 so a matrix that is zero up to roundoff has rank 0
    return int(np.count_nonzero(s > policy.tol_rank * max(float(s[0]), 1.0)))


def rank_tol(M, policy: TolerancePolicy) -> int:
    """Number of singular values above tol_rank * max(sigma_max, 1)."""
    return _relative_rank(singular_values(M), policy)


def null_space_basis(M, policy: TolerancePolicy) -> np.ndarray:
    """
    Orthonormal basis of the numerical kernel of M.

    Args:
        M: finite complex matrix
        policy: tolerance policy, tol_rank sets the cutoff

    Returns:
        cols x k matrix whose columns span ker M (k may be 0)
    """
    M = as_cmatrix(M)
    if not np.any(M.imag):
        # real input keeps a real basis
        M = M.real
    rows, cols = M.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=M.dtype)
    if rows == 0:
        return np.eye(cols, dtype=M.dtype)
    try:
        _, s, Vh = scipy.linalg.svd(M, full_matrices=True)
    except np.linalg.LinAlgError:
        raise NumericalFailure.from_template("svd_failed", rows=rows, cols=cols)
    rank = _relative_rank(s, policy)
    return Vh[rank:].conj().T


def range_basis(M, policy: TolerancePolicy) -> np.ndarray:
    """Orthonormal basis of the numerical column space of M."""
    U, s, _ = svd(M)
    return U[:, :_relative_rank(s, policy)]


def boundary_alpha(sigma, delta, policy: TolerancePolicy) -> float:
    """
    Smallest alpha > 0 at which sigma + alpha * delta reaches the PSD boundary.

    Computed in one factorization as 1 / lambda_max(sigma^{-1/2} (-delta) sigma^{-1/2}).

    Args:
        sigma: positive definite Hermitian matrix
        delta: traceless nonzero Hermitian direction
        policy: tolerance policy

    Returns:
        alpha* > 0

    Raises:
        ContractViolation: invalid input, or delta never leaves the PSD cone
    """
    sigma = as_cmatrix(sigma, "sigma")
    delta = as_cmatrix(delta, "delta")
    if sigma.shape != delta.shape or sigma.shape[0] != sigma.shape[1]:
        raise ContractViolation.from_template(
            "boundary_input", reason=f"shapes {sigma.shape} and {delta.shape} do not match"
        )
    norm = float(np.linalg.norm(delta))
    if norm <= policy.tol_fixed:
        raise ContractViolation.from_template("boundary_input", reason=f"direction norm {norm:.3e} is too small")
    if np.linalg.norm(delta - delta.conj().T) > HERMITIAN_TOL * max(1.0, norm):
        raise ContractViolation.from_template("boundary_input", reason="direction is not Hermitian")
    trace = complex(np.trace(delta))
    if abs(trace) > policy.tol_fixed:
        raise ContractViolation.from_template("boundary_input", reason=f"direction has trace {abs(trace):.3e}")

    values, vectors = hermitian_eig(sigma)
    if values[-1] <= 0.0:
        raise ContractViolation.from_template(
            "boundary_input", reason=f"sigma is not positive definite (lambda_min {values[-1]:.3e})"
        )
    inv_sqrt = (vectors / np.sqrt(values)) @ vectors.conj().T
    pencil = inv_sqrt @ (-delta) @ inv_sqrt
    lam_max = float(hermitian_eig((pencil + pencil.conj().T) / 2)[0][0])
    if lam_max <= policy.tol_fixed:
        raise ContractViolation.from_template("boundary_direction", value=lam_max)
    return 1.0 / lam_max


def cluster_values(values, width: float) -> List[Tuple[float, int]]:
    """
    Group values into clusters of neighbours closer than width.

    Returns:
        (mean, multiplicity) per cluster, in descending order
    """
    ordered = sorted((float(v) for v in values), reverse=True)
    clusters: List[List[float]] = []
    for value in ordered:
        if clusters and clusters[-1][-1] - value <= width:
            clusters[-1].append(value)
        else:
            clusters.append([value])
    return [(float(np.mean(group)), len(group)) for group in clusters]


def is_degenerate(values, width: float) -> bool:
    """True when two of the values fall in one cluster."""
    return any(count > 1 for _, count in cluster_values(values, width))


def spectra_match(first, second, width: float) -> bool:
    """Multiset comparison of two spectra after clustering at width."""
    if len(first) != len(second):
        return False
    left, right = cluster_values(first, width), cluster_values(second, width)
    if [count for _, count in left] != [count for _, count in right]:
        return False
    return all(abs(a - b) <= width for (a, _), (b, _) in zip(left, right))


def random_unit_vectors(count: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """count x dim array of Haar-random unit vectors in C^dim."""
    draws = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return draws / np.linalg.norm(draws, axis=1, keepdims=True)
