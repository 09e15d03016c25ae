"""
Fixed spaces of PTP maps and the projection onto them.

The primary construction is the spectral projector P = R (L* R)^{-1} L*, where
R and L span the right and left eigenvalue-1 eigenspaces of the natural matrix.
The Cesaro mean of the powers is kept as an independent cross-check.
"""

import logging
from typing import List

import numpy as np
import scipy.linalg

from config.fixedspace_config import CESARO_MAX_TERMS, SPECTRAL_NORM_GATE
from functions.channel import apply, build_superop, trace_residual
from functions.exceptions import InternalInconsistency, PositivityViolation
from functions.numerics import (
    hermitian_eig, null_space_basis, range_basis, singular_values, unvec, vec
)
from models.channel_models import CesaroResult, FixedSpace, Subspace, SuperOperator
from models.report_models import TolerancePolicy

logger = logging.getLogger(__name__)


def spectral_radius(psi: SuperOperator) -> float:
    """Largest eigenvalue modulus of the natural matrix; at most 1 for PTP maps."""
    return float(np.max(np.abs(scipy.linalg.eigvals(psi.natural))))


def spectral_norm_check(psi: SuperOperator) -> float:
    """
    Largest singular value of the natural matrix.

    Non-unital channels may exceed 1 here, so the gate warns only when the
    spectral radius exceeds it as well. Nothing is raised.
    """
    norm = float(singular_values(psi.natural)[0])
    if norm > SPECTRAL_NORM_GATE:
        radius = spectral_radius(psi)
        if radius > SPECTRAL_NORM_GATE:
            logger.warning(f"Spectral radius {radius:.6f} exceeds {SPECTRAL_NORM_GATE}; input is not PTP")
    return norm


def idempotence_residual(psi: SuperOperator) -> float:
    return float(np.linalg.norm(psi.natural @ psi.natural - psi.natural))


def is_idempotent(psi: SuperOperator, policy: TolerancePolicy) -> bool:
    return idempotence_residual(psi) <= policy.tol_fixed


def _shifted(psi: SuperOperator) -> np.ndarray:
    return psi.natural - np.eye(psi.dim * psi.dim)


def fixed_space_basis(psi: SuperOperator, policy: TolerancePolicy) -> FixedSpace:
    """
    Hilbert-Schmidt orthonormal basis of {mu : Psi(mu) = mu}.

    Args:
        psi: super-operator
        policy: tolerance policy

    Returns:
        FixedSpace spanning ker(N - I)

    Raises:
        InternalInconsistency: a trace-preserving map with no fixed point
    """
    kernel = null_space_basis(_shifted(psi), policy)
    if kernel.shape[1] == 0 and trace_residual(psi) <= policy.tol_fixed:
        raise InternalInconsistency.from_template("empty_fixed_space")
    basis = [unvec(kernel[:, k], psi.dim) for k in range(kernel.shape[1])]
    residual = float(np.linalg.norm(_shifted(psi) @ kernel)) if basis else 0.0
    logger.debug(f"Fixed space of dimension {len(basis)} in d={psi.dim}, residual {residual:.3e}")
    return FixedSpace(dim_ambient=psi.dim, basis=basis, residual=residual)


def hermitian_unit_basis(dim: int) -> np.ndarray:
    """
    Columns vec(B) of a Hilbert-Schmidt orthonormal basis of Hermitian operators:
    E_aa, then (E_ab + E_ba)/sqrt(2) and i(E_ab - E_ba)/sqrt(2) for a < b.
    """
    columns = []
    for a in range(dim):
        unit = np.zeros((dim, dim), dtype=complex)
        unit[a, a] = 1.0
        columns.append(vec(unit))
    for a in range(dim):
        for b in range(a + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[a, b] = sym[b, a] = 1.0 / np.sqrt(2.0)
            anti = np.zeros((dim, dim), dtype=complex)
            anti[a, b] = 1j / np.sqrt(2.0)
            anti[b, a] = -1j / np.sqrt(2.0)
            columns.extend([vec(sym), vec(anti)])
    return np.column_stack(columns)


def hermitian_fixed_basis(psi: SuperOperator, policy: TolerancePolicy) -> List[np.ndarray]:
    """
    Basis of the real space of Hermitian fixed points.

    The returned operators are orthonormal under the real inner product Tr(AB).
    """
    units = hermitian_unit_basis(psi.dim)
    residual_map = _shifted(psi) @ units
    coefficients = null_space_basis(np.vstack([residual_map.real, residual_map.imag]), policy).real
    basis = []
    for k in range(coefficients.shape[1]):
        op = unvec(units @ coefficients[:, k], psi.dim)
        basis.append((op + op.conj().T) / 2)
    return basis


def spectral_projection(psi: SuperOperator, policy: TolerancePolicy) -> SuperOperator:
    """
    Projection onto the fixed space along the other generalized eigenspaces.

    Args:
        psi: PTP super-operator
        policy: tolerance policy

    Returns:
        Phi with natural matrix P = R (L* R)^{-1} L*

    Raises:
        InternalInconsistency: empty fixed space of a TP map or unpaired eigenspaces
    """
    right = null_space_basis(_shifted(psi), policy)
    left = null_space_basis(_shifted(psi).conj().T, policy)
    if right.shape[1] == 0:
        if trace_residual(psi) <= policy.tol_fixed:
            raise InternalInconsistency.from_template("empty_fixed_space")
        d2 = psi.dim * psi.dim
        return build_superop(psi.dim, natural=np.zeros((d2, d2), dtype=complex))
    if right.shape[1] != left.shape[1]:
        raise InternalInconsistency.from_template("singular_pairing", value=0.0)

    pairing = left.conj().T @ right
    sigma_min = float(singular_values(pairing)[-1])
    if sigma_min < policy.tol_fixed:
        raise InternalInconsistency.from_template("singular_pairing", value=sigma_min)
    natural = right @ scipy.linalg.solve(pairing, left.conj().T)
    logger.debug(f"Spectral projection of rank {right.shape[1]}, pairing sigma_min {sigma_min:.3e}")
    return build_superop(psi.dim, natural=natural)


def cesaro_projection(psi: SuperOperator, policy: TolerancePolicy,
                      max_terms: int = CESARO_MAX_TERMS) -> CesaroResult:
    """
    Cesaro mean (1/M) sum_{n=1..M} Psi^n with M doubled until idempotent within tol_cert.

    Uses S_{2M} = (S_M + N^M S_M) / 2, so reaching M terms costs log2(M) products.

    Returns:
        CesaroResult; converged is False when max_terms is reached first
    """
    power = psi.natural.copy()
    average = psi.natural.copy()
    terms = 1
    while True:
        residual = float(np.linalg.norm(average @ average - average))
        if residual <= policy.tol_cert or terms >= max_terms:
            break
        average = (average + power @ average) / 2
        power = power @ power
        terms *= 2

    converged = residual <= policy.tol_cert
    if not converged:
        logger.warning(f"Cesaro mean not converged after {terms} terms (residual {residual:.3e})")
    return CesaroResult(
        projection=build_superop(psi.dim, natural=average),
        terms=terms,
        residual=residual,
        converged=converged
    )


def support_subspace(phi: SuperOperator, policy: TolerancePolicy) -> Subspace:
    """
    Support X of Phi(I/d), the subspace outside which every image vanishes.

    Raises:
        PositivityViolation: Phi(I/d) is not PSD within tol_fixed
    """
    image = apply(phi, np.eye(phi.dim) / phi.dim)
    values, vectors = hermitian_eig(image)
    if values[-1] < -policy.tol_fixed:
        raise PositivityViolation.from_template("not_positive", value=float(values[-1]))
    if values[0] <= 0.0:
        raise InternalInconsistency.from_template("empty_fixed_space")
    keep = values > policy.tol_rank * values[0]
    return Subspace(dim_ambient=phi.dim, isometry=vectors[:, keep])


def projection_image(phi: SuperOperator, policy: TolerancePolicy) -> np.ndarray:
    """Orthonormal columns spanning image(P) in vec coordinates."""
    return range_basis(phi.natural, policy)


def principal_angles(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """
    Principal angles between the column spans of two matrices.

    Operator bases are passed as vec columns; an empty side yields no angles.
    """
    if first.shape[1] == 0 or second.shape[1] == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(first, second)
