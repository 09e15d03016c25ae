"""
Block decomposition of the support of a PTP projection.

The support X is split into orthogonal blocks X_i, each carrying a full-rank
density rho_i with Phi(mu) = Tr(mu) rho_i on L(X_i). Blocks are found one at a
time as supports of minimum-rank fixed states, obtained by walking fixed
states to the boundary of the PSD cone.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from config.fixedspace_config import get_seed
from functions.channel import build_superop
from functions.exceptions import ContractViolation, NumericalFailure
from functions.numerics import boundary_alpha, hermitian_eig, null_space_basis, spectra_match, unvec
from functions.projector import hermitian_fixed_basis, support_subspace
from models.channel_models import Block, BlockDecomposition, Subspace, SuperOperator
from models.report_models import BlockActionReport, TolerancePolicy

logger = logging.getLogger(__name__)


def lift_matrix(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """kron(conj(right), left): maps vec(E) to vec(left E right*)."""
    return np.kron(right.conj(), left)


def invariance_residuals(phi: SuperOperator, sub: Subspace) -> np.ndarray:
    """
    Leakage ||(I - P) Phi(E)||_F + ||Phi(E) (I - P)||_F for every unit E = V E_ab V*.

    Entry a + b*r belongs to E_ab, matching column-stacking order.
    """
    iso = sub.isometry
    r = sub.dim
    complement = np.eye(phi.dim) - sub.projector()
    images = phi.natural @ lift_matrix(iso, iso)
    residuals = np.zeros(r * r)
    for index in range(r * r):
        image = unvec(images[:, index], phi.dim)
        residuals[index] = np.linalg.norm(complement @ image) + np.linalg.norm(image @ complement)
    return residuals


def restricted_projector(phi: SuperOperator, sub: Subspace, policy: TolerancePolicy) -> SuperOperator:
    """
    mu -> V* Phi(V mu V*) V on an invariant subspace.

    Args:
        phi: PTP projection
        sub: subspace with L(sub) invariant under phi
        policy: tolerance policy

    Returns:
        r^2 x r^2 super-operator on the subspace coordinates

    Raises:
        ContractViolation: L(sub) is not invariant within tol_fixed
    """
    residuals = invariance_residuals(phi, sub)
    if residuals.size:
        worst = int(np.argmax(residuals))
        if residuals[worst] > policy.tol_fixed:
            a, b = worst % sub.dim, worst // sub.dim
            raise ContractViolation.from_template(
                "not_invariant", index=f"E_{a}{b}", residual=float(residuals[worst])
            )
    lift = lift_matrix(sub.isometry, sub.isometry)
    return build_superop(sub.dim, natural=lift.conj().T @ phi.natural @ lift)


def _support(state: np.ndarray, policy: TolerancePolicy) -> Tuple[np.ndarray, np.ndarray]:
    values, vectors = hermitian_eig((state + state.conj().T) / 2)
    keep = values > policy.tol_rank * values[0]
    return values[keep], vectors[:, keep]


def _boundary_step(state: np.ndarray, direction: np.ndarray, policy: TolerancePolicy) -> Optional[np.ndarray]:
    delta = direction - np.trace(direction).real * state
    norm = float(np.linalg.norm(delta))
    if norm <= policy.tol_fixed:
        return None
    delta = delta / norm
    for signed in (delta, -delta):
        try:
            alpha = boundary_alpha(state, signed, policy)
        except ContractViolation:
            continue
        return state + alpha * signed
    return None


def min_rank_fixed_state(phi: SuperOperator, sub: Subspace, policy: TolerancePolicy,
                         seed: Optional[int] = None) -> Tuple[np.ndarray, Subspace]:
    """
    A fixed density of minimum rank inside an invariant subspace.

    Starts from Phi(P/r) and repeatedly moves along a traceless Hermitian fixed
    direction until the PSD boundary is hit, shrinking the support each time,
    until the fixed space restricted to the support is one-dimensional.

    Args:
        phi: PTP projection
        sub: invariant subspace to search in
        policy: tolerance policy
        seed: seed of the random fallback direction

    Returns:
        (rho as a d x d operator, its support)

    Raises:
        NumericalFailure: a boundary step did not reduce the rank
    """
    local = restricted_projector(phi, sub, policy)
    start = unvec(local.natural @ np.eye(sub.dim).reshape(-1, order="F"), sub.dim) / sub.dim
    _, vectors = _support(start, policy)
    iso = sub.isometry @ vectors
    state = vectors.conj().T @ start @ vectors
    state = state / np.trace(state).real
    rng = None

    while True:
        restricted = restricted_projector(phi, Subspace(dim_ambient=phi.dim, isometry=iso), policy)
        basis = hermitian_fixed_basis(restricted, policy)
        if len(basis) <= 1:
            break

        moved = None
        for candidate in basis:
            moved = _boundary_step(state, candidate, policy)
            if moved is not None:
                break
        if moved is None:
            rng = rng or np.random.default_rng(get_seed(seed))
            logger.warning(f"All {len(basis)} basis directions stalled at rank {iso.shape[1]}; using a seeded mix")
            weights = rng.standard_normal(len(basis))
            moved = _boundary_step(state, sum(w * f for w, f in zip(weights, basis)), policy)
            if moved is None:
                raise NumericalFailure.from_template("no_direction", count=len(basis))

        values, vectors = _support(moved, policy)
        rank = iso.shape[1]
        if len(values) >= rank:
            raise NumericalFailure.from_template("rank_stalled", rank=rank)
        logger.debug(f"Boundary step: rank {rank} -> {len(values)}")
        iso = iso @ vectors
        state = np.diag(values).astype(complex)
        state = state / np.trace(state).real

    rho = iso @ state @ iso.conj().T
    return rho, Subspace(dim_ambient=phi.dim, isometry=iso)


def _canonical_block(dim: int, support: Subspace, rho: np.ndarray) -> Block:
    local = support.isometry.conj().T @ rho @ support.isometry
    values, vectors = hermitian_eig((local + local.conj().T) / 2)
    values = values / values.sum()
    iso = support.isometry @ vectors
    return Block(
        subspace=Subspace(dim_ambient=dim, isometry=iso),
        rho=np.diag(values).astype(complex),
        spectrum=[float(v) for v in values]
    )


def block_decomposition(phi: SuperOperator, policy: TolerancePolicy,
                        seed: Optional[int] = None) -> BlockDecomposition:
    """
    Split the support X of phi into blocks X_1..X_l.

    Y <- X; repeat: rho_i = min_rank_fixed_state on Y, X_i = supp rho_i,
    Y <- Y minus X_i; until Y = {0}. Each block is expressed in the
    eigenbasis of its density and blocks are ordered by (dim, spectrum).

    Args:
        phi: idempotent PTP map
        policy: tolerance policy
        seed: seed of the random fallback in the minimum-rank walk

    Returns:
        BlockDecomposition
    """
    ambient = support_subspace(phi, policy)
    remaining = ambient.isometry
    blocks: List[Block] = []
    while remaining.shape[1] > 0:
        rho, support = min_rank_fixed_state(
            phi, Subspace(dim_ambient=phi.dim, isometry=remaining), policy, seed
        )
        blocks.append(_canonical_block(phi.dim, support, rho))
        coefficients = null_space_basis(support.isometry.conj().T @ remaining, policy)
        if coefficients.shape[1] + support.dim != remaining.shape[1]:
            raise NumericalFailure.from_template("rank_stalled", rank=remaining.shape[1])
        remaining = remaining @ coefficients
        logger.debug(f"Block of dim {support.dim} found, {remaining.shape[1]} dimensions left")

    blocks.sort(key=lambda block: (block.dim, tuple(block.spectrum)))
    logger.info(f"Decomposed support of dim {ambient.dim} into blocks of dims {[b.dim for b in blocks]}")
    return BlockDecomposition(blocks=blocks, ambient=ambient)


def equivalent_blocks(first: Block, second: Block, policy: TolerancePolicy) -> bool:
    """Same dimension and the same spectrum after clustering at tol_spec."""
    return first.dim == second.dim and spectra_match(first.spectrum, second.spectrum, policy.tol_spec)


def cross_images(phi: SuperOperator, first: Block, second: Block) -> np.ndarray:
    """Images of the units x_a y_b* (x in first, y in second) as vec columns."""
    return phi.natural @ lift_matrix(first.subspace.isometry, second.subspace.isometry)


def verify_block_action(phi: SuperOperator, dec: BlockDecomposition, policy: TolerancePolicy) -> BlockActionReport:
    """
    Residuals of Phi(mu) = Tr(mu) rho_i on each L(X_i), and of the zero action
    between blocks of different dimension or spectrum.
    """
    block_residuals = []
    for block in dec.blocks:
        iso = block.subspace.isometry
        images = phi.natural @ lift_matrix(iso, iso)
        expected = block.ambient_rho().reshape(-1, order="F")
        worst = 0.0
        for b in range(block.dim):
            for a in range(block.dim):
                target = expected if a == b else 0.0
                worst = max(worst, float(np.linalg.norm(images[:, a + b * block.dim] - target)))
        block_residuals.append(worst)

    cross_residuals = {}
    for i, first in enumerate(dec.blocks):
        for j in range(i + 1, len(dec.blocks)):
            second = dec.blocks[j]
            if equivalent_blocks(first, second, policy):
                continue
            worst = max(
                float(np.max(np.linalg.norm(cross_images(phi, first, second), axis=0))),
                float(np.max(np.linalg.norm(cross_images(phi, second, first), axis=0)))
            )
            cross_residuals[f"{i}-{j}"] = worst

    max_block = max(block_residuals, default=0.0)
    max_cross = max(cross_residuals.values(), default=0.0)
    return BlockActionReport(
        block_residuals=block_residuals,
        cross_residuals=cross_residuals,
        max_block_residual=max_block,
        max_cross_residual=max_cross,
        passed=max_block <= policy.tol_cert and max_cross <= policy.tol_cert
    )


def decomposition_signature(dec: BlockDecomposition, policy: TolerancePolicy) -> List[Tuple[int, List[float]]]:
    """Sorted (dim, spectrum) pairs; canonical even when the blocks are not."""
    return sorted((block.dim, [round(v / policy.tol_spec) * policy.tol_spec for v in block.spectrum])
                  for block in dec.blocks)


def signatures_match(first: BlockDecomposition, second: BlockDecomposition, policy: TolerancePolicy) -> bool:
    """Multiset equality of (dim, clustered spectrum) pairs."""
    if len(first.blocks) != len(second.blocks):
        return False
    unmatched = list(second.blocks)
    for block in first.blocks:
        partner = next((other for other in unmatched if equivalent_blocks(block, other, policy)), None)
        if partner is None:
            return False
        unmatched.remove(partner)
    return True
