"""
Super-operator representations, conversions and the channel predicates.

Conventions:
    vec is column stacking, and the natural matrix N satisfies N vec(mu) = vec(Psi(mu)).
    The Choi matrix J has entries J[(i,j),(k,l)] = e_i* Psi(E_jl) e_k, with row index i*d + j.
"""

import logging
from typing import Callable, List, Optional

import numpy as np
from pydantic import ValidationError

from config.fixedspace_config import FALSIFIER_SAMPLES
from functions.exceptions import InputError
from functions.numerics import as_cmatrix, hermitian_eig, random_unit_vectors, unvec, vec
from models.channel_models import SuperOperator
from models.report_models import ChannelFlags, PositivityWitness, TolerancePolicy

logger = logging.getLogger(__name__)

# Falsifier batch size, bounds memory at d = 8
_FALSIFIER_CHUNK = 2048


def natural_to_choi(natural: np.ndarray, dim: int) -> np.ndarray:
    n4 = np.asarray(natural).reshape(dim, dim, dim, dim)
    return np.einsum("kilj->ijkl", n4).reshape(dim * dim, dim * dim)


def choi_to_natural(choi: np.ndarray, dim: int) -> np.ndarray:
    j4 = np.asarray(choi).reshape(dim, dim, dim, dim)
    return np.einsum("ijkl->kilj", j4).reshape(dim * dim, dim * dim)


def kraus_to_natural(kraus: List[np.ndarray]) -> np.ndarray:
    return sum(np.kron(op.conj(), op) for op in kraus)


def build_superop(dim: int, kraus: Optional[List] = None, choi=None, natural=None) -> SuperOperator:
    """
    Build a super-operator from exactly one representation.

    Args:
        dim: dimension d of the underlying space
        kraus: list of d x d Kraus operators
        choi: d^2 x d^2 Choi matrix
        natural: d^2 x d^2 natural matrix

    Returns:
        SuperOperator with its natural matrix populated

    Raises:
        InputError: missing, duplicated or misshapen representation
    """
    given = [name for name, value in (("kraus", kraus), ("choi", choi), ("natural", natural)) if value is not None]
    if len(given) != 1:
        raise InputError.from_template(
            "invalid_channel", reason=f"exactly one representation is required, got {given or 'none'}"
        )
    if dim < 1:
        raise InputError.from_template("invalid_parameter", name="dim", reason="must be positive")
    d2 = dim * dim

    if kraus is not None:
        if len(kraus) == 0:
            raise InputError.from_template("invalid_channel", reason="empty Kraus list")
        ops = []
        for index, op in enumerate(kraus):
            op = as_cmatrix(op, f"kraus[{index}]")
            if op.shape != (dim, dim):
                raise InputError.from_template(
                    "shape_mismatch", representation=f"kraus[{index}]", expected=(dim, dim), actual=op.shape
                )
            ops.append(op)
        fields = {"natural": kraus_to_natural(ops), "kraus": ops}
    elif choi is not None:
        choi = as_cmatrix(choi, "choi")
        if choi.shape != (d2, d2):
            raise InputError.from_template("shape_mismatch", representation="choi", expected=(d2, d2), actual=choi.shape)
        fields = {"natural": choi_to_natural(choi, dim), "choi": choi}
    else:
        natural = as_cmatrix(natural, "natural")
        if natural.shape != (d2, d2):
            raise InputError.from_template(
                "shape_mismatch", representation="natural", expected=(d2, d2), actual=natural.shape
            )
        fields = {"natural": natural}

    try:
        return SuperOperator(dim=dim, **fields)
    except ValidationError as e:
        raise InputError.from_template("invalid_channel", reason=e.errors()[0]["msg"])


def superop_from_function(dim: int, action: Callable[[np.ndarray], np.ndarray]) -> SuperOperator:
    """Natural matrix of a linear action, read off on the unit operators E_ab."""
    columns = []
    for b in range(dim):
        for a in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[a, b] = 1.0
            columns.append(vec(action(unit)))
    return build_superop(dim, natural=np.column_stack(columns))


def choi_matrix(psi: SuperOperator) -> np.ndarray:
    if psi.choi is not None:
        return psi.choi
    return natural_to_choi(psi.natural, psi.dim)


def apply(psi: SuperOperator, mu) -> np.ndarray:
    """Psi(mu) through the natural matrix."""
    mu = as_cmatrix(mu, "operator")
    if mu.shape != (psi.dim, psi.dim):
        raise InputError.from_template(
            "dimension_mismatch", reason=f"operator is {mu.shape}, map acts on {psi.dim}x{psi.dim}"
        )
    return unvec(psi.natural @ vec(mu), psi.dim)


def unit_images(psi: SuperOperator) -> np.ndarray:
    """d x d x d x d array with images[a, b] = Psi(E_ab)."""
    d = psi.dim
    images = psi.natural.T.reshape(d, d, d, d).transpose(0, 1, 3, 2)
    return images.transpose(1, 0, 2, 3)


def trace_residual(psi: SuperOperator) -> float:
    identity = vec(np.eye(psi.dim, dtype=complex))
    return float(np.linalg.norm(psi.natural.conj().T @ identity - identity))


def hermiticity_residual(psi: SuperOperator) -> float:
    images = unit_images(psi)
    return float(np.linalg.norm(images.transpose(1, 0, 2, 3) - images.conj().transpose(0, 1, 3, 2)))


def choi_min_eigenvalue(psi: SuperOperator) -> float:
    """Smallest eigenvalue of the Hermitian part of the Choi matrix."""
    choi = choi_matrix(psi)
    return float(hermitian_eig((choi + choi.conj().T) / 2)[0][-1])


def classify(psi: SuperOperator, policy: TolerancePolicy, samples: int = 0, seed: int = 0) -> ChannelFlags:
    """
    Trace-preservation, Hermiticity-preservation and complete-positivity flags.

    Args:
        psi: super-operator
        policy: tolerance policy, tol_fixed decides every flag
        samples: falsifier samples for maps that are not CP (0 disables)
        seed: falsifier seed

    Returns:
        ChannelFlags
    """
    tp = trace_residual(psi) <= policy.tol_fixed
    hp = hermiticity_residual(psi) <= policy.tol_fixed
    lam_min = choi_min_eigenvalue(psi)
    cp = hp and lam_min >= -policy.tol_fixed

    witness = None
    if hp and not cp and samples > 0:
        witness = positivity_falsifier(psi, samples, seed, policy)
    return ChannelFlags(
        trace_preserving=tp,
        hermiticity_preserving=hp,
        completely_positive=cp,
        choi_min_eigenvalue=lam_min,
        positivity_witness=witness
    )


def positivity_falsifier(psi: SuperOperator, samples: int, seed: int,
                         policy: TolerancePolicy) -> Optional[PositivityWitness]:
    """
    Search for a pure state whose image has a negative eigenvalue.

    Draws Haar-random unit vectors x and computes lambda_min(Psi(x x*)).
    Finding nothing is not a proof of positivity.

    Returns:
        The most negative witness below -tol_fixed, or None
    """
    if samples < 1:
        raise InputError.from_template("invalid_parameter", name="samples", reason="must be at least 1")
    d = psi.dim
    rng = np.random.default_rng(seed)
    states = random_unit_vectors(samples, d, rng)
    transfer = psi.natural.T

    best_value, best_x, best_z = 0.0, None, None
    for start in range(0, samples, _FALSIFIER_CHUNK):
        chunk = states[start:start + _FALSIFIER_CHUNK]
        projectors = np.einsum("sb,sa->sba", chunk.conj(), chunk).reshape(len(chunk), d * d)
        outputs = (projectors @ transfer).reshape(len(chunk), d, d).transpose(0, 2, 1)
        outputs = (outputs + outputs.conj().transpose(0, 2, 1)) / 2
        values, vectors = np.linalg.eigh(outputs)
        index = int(np.argmin(values[:, 0]))
        if values[index, 0] < best_value:
            best_value = float(values[index, 0])
            best_x, best_z = chunk[index], vectors[index][:, 0]

    if best_x is None or best_value >= -policy.tol_fixed:
        logger.debug(f"No positivity violation in {samples} samples")
        return None
    logger.info(f"Positivity witness found with eigenvalue {best_value:.6f}")
    return PositivityWitness(x=best_x, z=best_z, value=best_value)


def _embedding(dim: int, offset: int, total: int) -> np.ndarray:
    iota = np.zeros((total, dim))
    iota[offset:offset + dim, :] = np.eye(dim)
    return iota


def direct_sum_superop(psi: SuperOperator, xi: SuperOperator) -> SuperOperator:
    """
    Psi (+) Xi on C^(d1 + d2): mu -> Psi(P1 mu P1) (+) Xi(P2 mu P2).

    Off-diagonal blocks of mu are annihilated.
    """
    total = psi.dim + xi.dim
    first = _embedding(psi.dim, 0, total)
    second = _embedding(xi.dim, psi.dim, total)
    natural = np.zeros((total * total, total * total), dtype=complex)
    for iota, part in ((first, psi), (second, xi)):
        lift = np.kron(iota, iota)
        natural += lift @ part.natural @ lift.T
    if psi.kraus is not None and xi.kraus is not None:
        kraus = [first @ op @ first.T for op in psi.kraus] + [second @ op @ second.T for op in xi.kraus]
        return build_superop(total, kraus=kraus)
    return build_superop(total, natural=natural)


def compose(psi: SuperOperator, xi: SuperOperator) -> SuperOperator:
    """Psi o Xi."""
    if psi.dim != xi.dim:
        raise InputError.from_template("dimension_mismatch", reason=f"cannot compose d={psi.dim} with d={xi.dim}")
    if psi.kraus is not None and xi.kraus is not None:
        return build_superop(psi.dim, kraus=[a @ b for a in psi.kraus for b in xi.kraus])
    return build_superop(psi.dim, natural=psi.natural @ xi.natural)


def conjugate_by_unitary(psi: SuperOperator, unitary) -> SuperOperator:
    """mu -> U Psi(U* mu U) U*, the same map written in a rotated basis."""
    unitary = as_cmatrix(unitary, "unitary")
    if unitary.shape != (psi.dim, psi.dim):
        raise InputError.from_template(
            "dimension_mismatch", reason=f"unitary is {unitary.shape}, map acts on {psi.dim}x{psi.dim}"
        )
    if psi.kraus is not None:
        return build_superop(psi.dim, kraus=[unitary @ op @ unitary.conj().T for op in psi.kraus])
    outer = np.kron(unitary.conj(), unitary)
    inner = np.kron(unitary.T, unitary.conj().T)
    return build_superop(psi.dim, natural=outer @ psi.natural @ inner)


def to_kraus(psi: SuperOperator, policy: TolerancePolicy) -> Optional[List[np.ndarray]]:
    """
    Kraus operators of a CP map, extracted from its Choi matrix.

    Returns:
        Kraus list, or None when the Choi matrix is not PSD within tol_fixed
    """
    if psi.kraus is not None:
        return list(psi.kraus)
    if hermiticity_residual(psi) > policy.tol_fixed:
        return None
    values, vectors = hermitian_eig((choi_matrix(psi) + choi_matrix(psi).conj().T) / 2)
    if values[-1] < -policy.tol_fixed:
        return None
    if values[0] <= 0.0:
        return [np.zeros((psi.dim, psi.dim), dtype=complex)]
    keep = values > policy.tol_rank * values[0]
    return [np.sqrt(value) * vectors[:, k].reshape(psi.dim, psi.dim)
            for k, value in zip(np.flatnonzero(keep), values[keep])]
