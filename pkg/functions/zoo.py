"""
Generators of channels and projectors with planted, known answers.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from config.fixedspace_config import CASE_HALF, CASE_PARTITION, get_error_message, get_seed
from functions.channel import build_superop, conjugate_by_unitary, direct_sum_superop, superop_from_function
from functions.exceptions import InputError
from models.channel_models import SuperOperator
from models.report_models import ZooSpec

logger = logging.getLogger(__name__)

_UNITARY_TOL = 1e-10


def _invalid(name: str, reason: str) -> InputError:
    return InputError(get_error_message("invalid_parameter", name=name, reason=reason), name=name)


def _require(value, name: str):
    if value is None:
        raise _invalid(name, "is required for this kind")
    return value


def _unit(dim: int, a: int, b: int) -> np.ndarray:
    unit = np.zeros((dim, dim), dtype=complex)
    unit[a, b] = 1.0
    return unit


def _check_probability(spectrum: Sequence[float], name: str = "spectrum") -> np.ndarray:
    values = np.asarray(spectrum, dtype=float)
    if values.size == 0 or np.any(values <= 0) or abs(values.sum() - 1.0) > 1e-12:
        raise _invalid(name, f"must be a positive probability vector, got {list(values)}")
    return values


def depolarizing(dim: int, p: float) -> SuperOperator:
    """mu -> (1 - p) mu + p Tr(mu) I / d."""
    if not 0.0 <= p <= 1.0:
        raise _invalid("p", "must lie in [0, 1]")
    kraus = [] if p == 1.0 else [np.sqrt(1.0 - p) * np.eye(dim, dtype=complex)]
    if p > 0.0:
        kraus += [np.sqrt(p / dim) * _unit(dim, a, b) for a in range(dim) for b in range(dim)]
    return build_superop(dim, kraus=kraus)


def dephasing(dim: int, p: float) -> SuperOperator:
    """mu -> (1 - p) mu + p diag(mu)."""
    if not 0.0 <= p <= 1.0:
        raise _invalid("p", "must lie in [0, 1]")
    kraus = [] if p == 1.0 else [np.sqrt(1.0 - p) * np.eye(dim, dtype=complex)]
    if p > 0.0:
        kraus += [np.sqrt(p) * _unit(dim, a, a) for a in range(dim)]
    return build_superop(dim, kraus=kraus)


def amplitude_damping(p: float) -> SuperOperator:
    """Qubit decay towards e_1 with probability p."""
    if not 0.0 <= p <= 1.0:
        raise _invalid("p", "must lie in [0, 1]")
    decay = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    keep = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex)
    return build_superop(2, kraus=[keep, decay])


def unitary_channel(unitary) -> SuperOperator:
    """mu -> U mu U*."""
    unitary = np.asarray(unitary, dtype=complex)
    dim = unitary.shape[0]
    if unitary.shape != (dim, dim) or np.linalg.norm(unitary.conj().T @ unitary - np.eye(dim)) > _UNITARY_TOL:
        raise _invalid("unitary", "must be a square unitary matrix")
    return build_superop(dim, kraus=[unitary])


def transpose_map(dim: int) -> SuperOperator:
    return superop_from_function(dim, lambda mu: mu.T)


def transpose_symmetrizer(dim: int) -> SuperOperator:
    """mu -> (mu + mu^T) / 2, the projection onto symmetric operators."""
    return superop_from_function(dim, lambda mu: (mu + mu.T) / 2)


def conditional_expectation_projector(blocks: List[Tuple[int, Sequence[float]]], transient: int = 0) -> SuperOperator:
    """
    The idempotent CPTP map (+)_i Id_{L(Y_i)} (x) Gamma^{rho_i}, Gamma^rho(mu) = Tr(mu) rho.

    Block i occupies basis vectors offset_i + y*m_i + z, with rho_i = diag(spectrum_i).
    Transient dimensions are appended after the blocks and drained into
    e_0 e_0* (x) rho_0 of the first block, so the support stays a proper subspace.

    Args:
        blocks: (dim Y_i, spectrum_i) per block
        transient: number of extra ambient dimensions

    Returns:
        SuperOperator with Kraus form
    """
    if not blocks:
        raise _invalid("blocks", "at least one block is required")
    if transient < 0:
        raise _invalid("transient", "must be non-negative")
    spectra = [_check_probability(spectrum) for _, spectrum in blocks]
    if any(dim_y < 1 for dim_y, _ in blocks):
        raise _invalid("blocks", "dim Y must be positive")
    dim = sum(dim_y * len(spectrum) for (dim_y, _), spectrum in zip(blocks, spectra)) + transient

    kraus = []
    offset = 0
    for (dim_y, _), spectrum in zip(blocks, spectra):
        m = len(spectrum)
        for a in range(m):
            for b in range(m):
                op = np.zeros((dim, dim), dtype=complex)
                for y in range(dim_y):
                    op[offset + y * m + a, offset + y * m + b] = np.sqrt(spectrum[a])
                kraus.append(op)
        offset += dim_y * m

    first = spectra[0]
    for t in range(transient):
        for a in range(len(first)):
            op = np.zeros((dim, dim), dtype=complex)
            op[a, offset + t] = np.sqrt(first[a])
            kraus.append(op)
    return build_superop(dim, kraus=kraus)


def spec_case_projector(m: int, r: Sequence[float], case: str, l: int,
                        partition: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
                        pad: int = 0) -> SuperOperator:
    """
    PTP projection with l equivalent blocks of dim m and a planted cross action.

    With x_{i,k} = e_{i*m + k} and rho = diag(r):

        Half:      Phi(x_ig x_jh*) = delta_gh / 2 * sum_k r_k (x_ik x_jk* + x_jk x_ik*)
        Partition: Phi(x_ig x_jh*) = delta_gh * (sum_{S^b} r_k x_ik x_jk* + sum_{S^(1-b)} r_k x_jk x_ik*),
                   for g in S^b

    The same formula covers i = j, where it reduces to Tr(mu) rho. A positive
    pad appends a depolarizing block of that dimension.

    Args:
        m: block dimension
        r: strictly decreasing probability vector of length m
        case: "Half" or "Partition"
        l: number of blocks, at least 2
        partition: (S0, S1), zero-based, for the Partition case
        pad: dimension of the appended depolarizing block

    Returns:
        SuperOperator given by its natural matrix
    """
    r = _check_probability(r, "r")
    if len(r) != m:
        raise _invalid("r", f"needs {m} entries, got {len(r)}")
    if np.any(np.diff(r) >= 0):
        raise _invalid("r", "entries must be strictly decreasing")
    if l < 2:
        raise _invalid("l", "at least two blocks are required")
    if case == CASE_HALF:
        parts = None
    elif case == CASE_PARTITION:
        if partition is None:
            raise _invalid("partition", "is required for the Partition case")
        s0, s1 = (sorted(int(k) for k in part) for part in partition)
        if set(s0) & set(s1) or sorted(s0 + s1) != list(range(m)):
            raise _invalid("partition", f"must split 0..{m - 1} into two disjoint sets")
        parts = (s0, s1)
    else:
        raise _invalid("case", f"must be Half or Partition, got {case}")

    dim = l * m
    basis = np.eye(dim, dtype=complex)

    def x(i: int, k: int) -> np.ndarray:
        return basis[:, i * m + k]

    def cross(i: int, j: int, ks: Sequence[int]) -> np.ndarray:
        return sum((r[k] * np.outer(x(i, k), x(j, k).conj()) for k in ks), np.zeros((dim, dim), dtype=complex))

    natural = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(l):
        for j in range(l):
            if parts is None:
                image = (cross(i, j, range(m)) + cross(j, i, range(m))) / 2
                images = {g: image for g in range(m)}
            else:
                by_part = [cross(i, j, parts[0]) + cross(j, i, parts[1]),
                           cross(i, j, parts[1]) + cross(j, i, parts[0])]
                images = {g: by_part[0 if g in parts[0] else 1] for g in range(m)}
            for g in range(m):
                column = (i * m + g) + (j * m + g) * dim
                natural[:, column] = images[g].reshape(-1, order="F")

    projector = build_superop(dim, natural=natural)
    if pad:
        projector = direct_sum_superop(projector, depolarizing(pad, 1.0))
    return projector


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR factorization of a complex Gaussian matrix."""
    return _haar_isometry(dim, dim, rng)


def _haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    gaussian = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = scipy.linalg.qr(gaussian, mode="economic")
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def random_cptp(dim: int, kraus_count: int, seed: int) -> SuperOperator:
    """
    CPTP channel from a Haar-random isometry C^d -> C^(d*k), sliced into k Kraus operators.

    Deterministic per seed.
    """
    if kraus_count < 1:
        raise _invalid("kraus_count", "must be at least 1")
    rng = np.random.default_rng(seed)
    isometry = _haar_isometry(dim * kraus_count, dim, rng)
    return build_superop(dim, kraus=[isometry[k * dim:(k + 1) * dim, :] for k in range(kraus_count)])


def structured_cptp(factors: List[Tuple[int, int]], kraus_count: int, seed: int,
                    rotate: bool = False) -> SuperOperator:
    """
    (+)_i Id_{L(Y_i)} (x) T_i with random CPTP maps T_i on Z_i.

    Generic T_i are primitive, so the fixed space is (+)_i L(Y_i) (x) rho_i with
    dimension sum_i (dim Y_i)^2.
    """
    if not factors or any(dim_y < 1 or dim_z < 1 for dim_y, dim_z in factors):
        raise _invalid("factors", "need at least one (dim Y, dim Z) pair of positive dimensions")
    rng = np.random.default_rng(seed)
    dim = sum(dim_y * dim_z for dim_y, dim_z in factors)
    kraus = []
    offset = 0
    for dim_y, dim_z in factors:
        inner = random_cptp(dim_z, kraus_count, int(rng.integers(2 ** 31)))
        for op in inner.kraus:
            embedded = np.zeros((dim, dim), dtype=complex)
            embedded[offset:offset + dim_y * dim_z, offset:offset + dim_y * dim_z] = np.kron(np.eye(dim_y), op)
            kraus.append(embedded)
        offset += dim_y * dim_z
    channel = build_superop(dim, kraus=kraus)
    if rotate:
        channel = conjugate_by_unitary(channel, haar_unitary(dim, rng))
    return channel


def random_block_projector(seed: int, max_dim: int = 5) -> SuperOperator:
    """Haar-rotated conditional expectation with random blocks and spectra."""
    rng = np.random.default_rng(seed)
    blocks = []
    used = 0
    while True:
        dim_y = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        if used + dim_y * m > max_dim:
            break
        weights = rng.uniform(0.2, 1.0, size=m)
        blocks.append((dim_y, list(weights / weights.sum())))
        used += dim_y * m
        if rng.uniform() < 0.4:
            break
    if not blocks:
        blocks = [(1, [1.0])]
    projector = conditional_expectation_projector(blocks)
    return conjugate_by_unitary(projector, haar_unitary(projector.dim, rng))


def builtin_channel(spec: ZooSpec) -> SuperOperator:
    """
    Build the channel or projector a ZooSpec describes.

    Raises:
        InputError: missing or invalid parameters
    """
    kind = spec.kind
    seed = get_seed(spec.seed)
    if kind == "depolarizing":
        return depolarizing(_require(spec.dim, "dim"), _require(spec.p, "p"))
    if kind == "dephasing":
        return dephasing(_require(spec.dim, "dim"), _require(spec.p, "p"))
    if kind == "amplitude_damping":
        if spec.dim not in (None, 2):
            raise _invalid("dim", "amplitude damping acts on a qubit")
        return amplitude_damping(_require(spec.p, "p"))
    if kind == "unitary":
        if spec.unitary is not None:
            return unitary_channel([[complex(re, im) for re, im in row] for row in spec.unitary])
        phases = _require(spec.phases, "phases")
        return unitary_channel(np.diag(np.exp(1j * np.asarray(phases, dtype=float))))
    if kind == "transpose":
        return transpose_map(_require(spec.dim, "dim"))
    if kind == "symmetrizer":
        return transpose_symmetrizer(_require(spec.dim, "dim"))
    if kind == "conditional_expectation":
        return conditional_expectation_projector(_require(spec.blocks, "blocks"), spec.transient)
    if kind == "spec_case":
        return spec_case_projector(
            _require(spec.m, "m"), _require(spec.r, "r"), _require(spec.case, "case"),
            _require(spec.l, "l"), spec.partition, spec.pad
        )
    if kind == "random_cptp":
        return random_cptp(_require(spec.dim, "dim"), _require(spec.kraus_count, "kraus_count"), seed)
    if kind == "structured_cptp":
        return structured_cptp(_require(spec.factors, "factors"), spec.kraus_count or 3, seed, spec.rotate)
    raise InputError.from_template("unknown_kind", kind=kind)


def corpus(seed: int = 0, random_count: int = 4) -> List[Tuple[str, SuperOperator]]:
    """Named zoo projectors and channels used by sweeps and acceptance tests."""
    entries = [
        ("depolarizing-3", depolarizing(3, 0.5)),
        ("dephasing-3", dephasing(3, 0.3)),
        ("amplitude-damping", amplitude_damping(0.4)),
        ("unitary-pinching-3", unitary_channel(np.diag(np.exp(1j * np.array([0.0, np.pi / 3, np.pi / 5]))))),
        ("transpose-2", transpose_map(2)),
        ("symmetrizer-3", transpose_symmetrizer(3)),
        ("conditional-expectation-2x2", conditional_expectation_projector([(2, [0.75, 0.25])])),
        ("conditional-expectation-mixed", conditional_expectation_projector([(1, [0.75, 0.25]), (1, [0.5, 0.5])])),
        ("conditional-expectation-transient", conditional_expectation_projector([(1, [0.75, 0.25])], transient=1)),
        ("conditional-expectation-planted", conditional_expectation_projector([(2, [0.75, 0.25]), (1, [1.0])])),
        ("spec-case-half", spec_case_projector(2, [0.75, 0.25], CASE_HALF, 2)),
        ("spec-case-partition", spec_case_projector(2, [0.75, 0.25], CASE_PARTITION, 2, ([0], [1]))),
        ("spec-case-padded", spec_case_projector(1, [1.0], CASE_HALF, 2, pad=2)),
        ("structured-cptp", structured_cptp([(2, 2), (1, 1)], 3, seed, rotate=True)),
    ]
    rng = np.random.default_rng(seed)
    for index in range(random_count):
        entries.append((f"random-block-projector-{index}", random_block_projector(int(rng.integers(2 ** 31)))))
    return entries
