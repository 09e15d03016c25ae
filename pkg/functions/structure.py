"""
Cross-block structure of a PTP projection.

For two equivalent blocks Y and Z a nonzero cross action is certified by the
SVD of a fixed Hermitian point xi between them, which aligns the eigenbases
y_k, z_k and gives the shared spectrum r. The action is then one of:

    Half:      Phi(y_i z_j*) = delta_ij / 2 * sum_k r_k (y_k z_k* + z_k y_k*)
    Partition: Phi(y_i z_j*) = delta_ij * (sum_{k in S^b} r_k y_k z_k* + sum_{k in S^(1-b)} r_k z_k y_k*),
               for i in S^b

CP maps only show Partition with S1 empty, giving the direct sum of
Id_{L(Y_i)} (x) Gamma^{rho_i} factors.
"""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.fixedspace_config import (
    CASE_HALF, CASE_PARTITION, CASE_ZERO,
    STATUS_CERTIFIED, STATUS_INCONSISTENT, STATUS_UNDETERMINED,
    get_error_message
)
from functions.channel import classify
from functions.decompose import equivalent_blocks, lift_matrix
from functions.exceptions import ContractViolation
from functions.numerics import is_degenerate, svd, unvec
from functions.projector import fixed_space_basis
from models.channel_models import Block, BlockDecomposition, SuperOperator
from models.report_models import (
    ClassSummary, CptpFactor, CptpForm, CrossBlockCase, CrossBlockCertificate,
    StructureReport, TolerancePolicy
)

logger = logging.getLogger(__name__)


def pair_images(phi: SuperOperator, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """m x m x d x d array with images[i, j] = Phi(left_i right_j*)."""
    m, d = left.shape[1], phi.dim
    columns = phi.natural @ lift_matrix(left, right)
    images = np.empty((m, m, d, d), dtype=complex)
    for j in range(m):
        for i in range(m):
            images[i, j] = unvec(columns[:, i + j * m], d)
    return images


def _outer_sum(weights, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return (left * np.asarray(weights)) @ right.conj().T


def _find_fixed_hermitian(phi: SuperOperator, blockY: Block, blockZ: Block,
                          policy: TolerancePolicy) -> Optional[np.ndarray]:
    iso_y, iso_z = blockY.subspace.isometry, blockZ.subspace.isometry
    forward = pair_images(phi, iso_y, iso_z)
    backward = pair_images(phi, iso_z, iso_y)
    m = blockY.dim
    for b in range(m):
        for a in range(m):
            image, image_star = forward[a, b], backward[b, a]
            for candidate in ((image + image_star) / 2, 1j * (image - image_star) / 2):
                if np.linalg.norm(candidate) > policy.tol_cert:
                    return (candidate + candidate.conj().T) / 2
    return None


def cross_block_certificate(phi: SuperOperator, blockY: Block, blockZ: Block,
                            policy: TolerancePolicy) -> Optional[CrossBlockCertificate]:
    """
    Certify the cross action between two blocks of equal dimension.

    Searches Phi(Re theta) then Phi(Im theta) over the units theta = y_a z_b*;
    the first nonzero one is the fixed Hermitian xi. The SVD of P_Y xi P_Z
    gives c, r, y_k, z_k, which are checked against the equalities

        f1: rho = sum r_k y_k y_k*, sigma = sum r_k z_k z_k*
        f2: Phi(y_i z_i* + z_i y_i*) = sum r_k (y_k z_k* + z_k y_k*)
        f3: Phi(y_i z_j* + z_i y_j*) = 0 for i != j

    Args:
        phi: idempotent PTP map
        blockY: first block
        blockZ: second block, same dimension
        policy: tolerance policy

    Returns:
        Certificate, or None when the cross action vanishes (case Zero)
    """
    if blockY.dim != blockZ.dim:
        raise ContractViolation.from_template(
            "dimension_mismatch", reason=f"blocks of dims {blockY.dim} and {blockZ.dim} cannot be aligned"
        )
    xi = _find_fixed_hermitian(phi, blockY, blockZ, policy)
    if xi is None:
        return None

    iso_y, iso_z = blockY.subspace.isometry, blockZ.subspace.isometry
    U, s, W = svd(iso_y.conj().T @ xi @ iso_z)
    c = float(s.sum())
    r = s / c
    y, z = iso_y @ U, iso_z @ W

    f1 = max(
        float(np.linalg.norm(blockY.ambient_rho() - _outer_sum(r, y, y))),
        float(np.linalg.norm(blockZ.ambient_rho() - _outer_sum(r, z, z)))
    )
    aligned = _outer_sum(r, y, z) + _outer_sum(r, z, y)
    forward, backward = pair_images(phi, y, z), pair_images(phi, z, y)
    m = blockY.dim
    f2, f3 = 0.0, 0.0
    for i in range(m):
        for j in range(m):
            image = forward[i, j] + backward[i, j]
            if i == j:
                f2 = max(f2, float(np.linalg.norm(image - aligned)))
            else:
                f3 = max(f3, float(np.linalg.norm(image)))

    residuals = {"f1": f1, "f2": f2, "f3": f3}
    violated = next((tag for tag, value in residuals.items() if value > policy.tol_cert), None)
    if violated:
        logger.warning(f"Cross-block equality {violated} violated (residual {residuals[violated]:.3e})")
    return CrossBlockCertificate(
        m=m, c=c, r=[float(v) for v in r], y=y, z=z, xi=xi, residuals=residuals, violated=violated
    )


def _alpha(images: np.ndarray, y: np.ndarray, z: np.ndarray, r: np.ndarray) -> np.ndarray:
    m = len(r)
    alpha = np.empty((m, m), dtype=complex)
    for i in range(m):
        alpha[i] = np.diag(y.conj().T @ images[i, i] @ z) / r
    return alpha


def _half_residual(images: np.ndarray, y: np.ndarray, z: np.ndarray, r: np.ndarray) -> float:
    expected = (_outer_sum(r, y, z) + _outer_sum(r, z, y)) / 2
    m = len(r)
    return max(
        float(np.linalg.norm(images[i, j] - (expected if i == j else 0.0)))
        for i in range(m) for j in range(m)
    )


def _partition_residual(images: np.ndarray, y: np.ndarray, z: np.ndarray, r: np.ndarray,
                        s0: List[int], s1: List[int]) -> float:
    def expected(own: List[int], other: List[int]) -> np.ndarray:
        return _outer_sum(r[own], y[:, own], z[:, own]) + _outer_sum(r[other], z[:, other], y[:, other])

    m = len(r)
    by_part = {0: expected(s0, s1), 1: expected(s1, s0)}
    worst = 0.0
    for i in range(m):
        for j in range(m):
            target = by_part[0 if i in s0 else 1] if i == j else 0.0
            worst = max(worst, float(np.linalg.norm(images[i, j] - target)))
    return worst


def classify_aligned(phi: SuperOperator, y: np.ndarray, z: np.ndarray, r, policy: TolerancePolicy,
                     c: Optional[float] = None) -> CrossBlockCase:
    """
    Half / Partition classification for aligned bases y_k, z_k with spectrum r.

    alpha[i, k] = (y_k* Phi(y_i z_i*) z_k) / r_k is 1/2 everywhere for Half and
    the indicator of the part containing i for Partition. S0 always contains 0.
    Degenerate spectra are only certified when they match Partition with S1 empty.
    """
    r = np.asarray(r, dtype=float)
    m = len(r)
    images = pair_images(phi, y, z)
    alpha = _alpha(images, y, z, r)
    alpha_tol = policy.tol_cert / float(r.min())
    common = {"c": c, "r": [float(v) for v in r], "y": y, "z": z}

    if float(np.abs(alpha.imag).max()) > alpha_tol:
        return CrossBlockCase(status=STATUS_INCONSISTENT, detail="alpha coefficients are not real", **common)
    alpha = alpha.real

    if is_degenerate(r, policy.tol_spec):
        if np.all(np.abs(alpha - 1.0) <= alpha_tol):
            residual = _partition_residual(images, y, z, r, list(range(m)), [])
            if residual <= policy.tol_cert:
                return CrossBlockCase(kind=CASE_PARTITION, partition=(list(range(m)), []),
                                      residual=residual, **common)
        logger.info(f"Degenerate spectrum {np.round(r, 6).tolist()}: case left undetermined")
        return CrossBlockCase(status=STATUS_UNDETERMINED, detail="degenerate spectrum", **common)

    if np.all(np.abs(alpha - 0.5) <= alpha_tol):
        residual = _half_residual(images, y, z, r)
        if residual > policy.tol_cert:
            return CrossBlockCase(status=STATUS_INCONSISTENT, residual=residual,
                                  detail=f"Half action residual {residual:.3e}", **common)
        return CrossBlockCase(kind=CASE_HALF, residual=residual, **common)

    s0 = [k for k in range(m) if abs(alpha[0, k] - 1.0) <= alpha_tol]
    s1 = [k for k in range(m) if k not in s0]
    for i in range(m):
        indicator = np.array([1.0 if (k in s0) == (i in s0) else 0.0 for k in range(m)])
        if np.any(np.abs(alpha[i] - indicator) > alpha_tol):
            return CrossBlockCase(status=STATUS_INCONSISTENT,
                                  detail="alpha pattern matches neither Half nor Partition", **common)
    residual = _partition_residual(images, y, z, r, s0, s1)
    if residual > policy.tol_cert:
        return CrossBlockCase(status=STATUS_INCONSISTENT, residual=residual,
                              detail=f"Partition action residual {residual:.3e}", **common)
    return CrossBlockCase(kind=CASE_PARTITION, partition=(s0, s1), residual=residual, **common)


def classify_cross_case(phi: SuperOperator, blockY: Block, blockZ: Block,
                        precursor: Optional[CrossBlockCertificate], policy: TolerancePolicy) -> CrossBlockCase:
    """
    Classify the cross action certified by cross_block_certificate.

    Returns:
        CrossBlockCase: Zero without a precursor; Inconsistent when the precursor
        carries a violated equality on a nondegenerate spectrum
    """
    if precursor is None:
        return CrossBlockCase(kind=CASE_ZERO)
    if precursor.violated:
        status = STATUS_UNDETERMINED if is_degenerate(precursor.r, policy.tol_spec) else STATUS_INCONSISTENT
        return CrossBlockCase(
            status=status, c=precursor.c, r=precursor.r, y=precursor.y, z=precursor.z,
            residual=precursor.residuals[precursor.violated],
            detail=f"equality {precursor.violated} violated"
        )
    return classify_aligned(phi, precursor.y, precursor.z, precursor.r, policy, c=precursor.c)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first nonzero component is real positive."""
    fixed = np.array(vectors, dtype=complex)
    for k in range(fixed.shape[1]):
        column = fixed[:, k]
        significant = np.flatnonzero(np.abs(column) > 1e-8 * np.abs(column).max())
        pivot = column[significant[0]]
        fixed[:, k] = column * (np.conj(pivot) / abs(pivot))
    return fixed


def _components(count: int, edges: List[Tuple[int, int]]) -> List[List[int]]:
    neighbours: Dict[int, set] = {index: set() for index in range(count)}
    for a, b in edges:
        neighbours[a].add(b)
        neighbours[b].add(a)
    seen, components = set(), []
    for start in range(count):
        if start in seen:
            continue
        stack, component = [start], []
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            component.append(node)
            stack.extend(neighbours[node] - seen)
        components.append(sorted(component))
    return components


def _worst_status(statuses: List[str]) -> str:
    if STATUS_INCONSISTENT in statuses:
        return STATUS_INCONSISTENT
    if STATUS_UNDETERMINED in statuses:
        return STATUS_UNDETERMINED
    return STATUS_CERTIFIED


def global_structure(phi: SuperOperator, dec: BlockDecomposition, policy: TolerancePolicy) -> StructureReport:
    """
    Connectivity classes of blocks and one uniform case per class.

    Connected pairs must form cliques. Within a class every block basis is
    aligned through the lowest-index block, whose vectors carry the phase
    convention, and every pair is classified with the aligned bases.

    Args:
        phi: idempotent PTP map
        dec: verified block decomposition
        policy: tolerance policy

    Returns:
        StructureReport with status Certified, Undetermined or Inconsistent
    """
    blocks = dec.blocks
    certificates: Dict[Tuple[int, int], CrossBlockCertificate] = {}
    statuses: List[str] = []
    details: List[str] = []
    cert_residual = 0.0

    for i, j in combinations(range(len(blocks)), 2):
        if not equivalent_blocks(blocks[i], blocks[j], policy):
            continue
        certificate = cross_block_certificate(phi, blocks[i], blocks[j], policy)
        if certificate is None:
            continue
        cert_residual = max(cert_residual, *certificate.residuals.values())
        if certificate.violated:
            case = classify_cross_case(phi, blocks[i], blocks[j], certificate, policy)
            statuses.append(case.status)
            details.append(f"pair {i}-{j}: {case.detail}")
            continue
        certificates[(i, j)] = certificate

    classes: List[ClassSummary] = []
    aligned: Dict[int, np.ndarray] = {}
    pair_cases: Dict[str, str] = {}
    case_residual = 0.0

    for component in _components(len(blocks), list(certificates)):
        reference = component[0]
        block = blocks[reference]
        missing = [pair for pair in combinations(component, 2) if pair not in certificates]
        if missing:
            statuses.append(STATUS_INCONSISTENT)
            details.append(f"connectivity is not transitive: pairs {missing} have no cross action")
            classes.append(ClassSummary(blocks=component, spectrum=block.spectrum, l=len(component), m=block.dim))
            continue

        if len(component) == 1:
            aligned[reference] = fix_phases(block.subspace.isometry)
            classes.append(ClassSummary(
                blocks=component, case=CASE_PARTITION, partition=(list(range(block.dim)), []),
                spectrum=block.spectrum, l=1, m=block.dim
            ))
            continue

        first = certificates[(reference, component[1])]
        base = fix_phases(first.y)
        r = first.r
        aligned[reference] = base
        for other in component[1:]:
            certificate = certificates[(reference, other)]
            rotation = certificate.y.conj().T @ base
            aligned[other] = certificate.z @ rotation

        cases = []
        for a, b in combinations(component, 2):
            case = classify_aligned(phi, aligned[a], aligned[b], r, policy)
            pair_cases[f"{a}-{b}"] = case.kind or case.status
            case_residual = max(case_residual, case.residual)
            if case.status != STATUS_CERTIFIED:
                statuses.append(case.status)
                details.append(f"pair {a}-{b}: {case.detail}")
            cases.append(case)

        kinds = {(case.kind, None if case.partition is None else (tuple(case.partition[0]), tuple(case.partition[1])))
                 for case in cases}
        if all(case.status == STATUS_CERTIFIED for case in cases) and len(kinds) != 1:
            statuses.append(STATUS_INCONSISTENT)
            details.append(f"class {component} mixes cases {sorted(str(kind) for kind in kinds)}")
        uniform = cases[0] if len(kinds) == 1 and cases[0].status == STATUS_CERTIFIED else None
        classes.append(ClassSummary(
            blocks=component,
            case=None if uniform is None else uniform.kind,
            partition=None if uniform is None else uniform.partition,
            spectrum=[float(v) for v in r], l=len(component), m=block.dim
        ))

    status = _worst_status(statuses)
    if status != STATUS_CERTIFIED:
        logger.warning(f"Structure {status}: {'; '.join(details)}")
    return StructureReport(
        classes=classes,
        pair_cases=pair_cases,
        aligned=aligned,
        status=status,
        detail="; ".join(details) or None,
        residuals={"cross_certificate": cert_residual, "cross_case": case_residual}
    )


def _form_residual(phi: SuperOperator, factors: List[CptpFactor]) -> float:
    isometries = [factor.isometry for factor in factors]
    total = np.hstack(isometries)
    n = total.shape[1]
    images = phi.natural @ lift_matrix(total, total)

    labels = []
    for index, factor in enumerate(factors):
        labels.extend((index, i, k) for i in range(factor.dim_y) for k in range(factor.dim_z))
    worst = 0.0
    for b in range(n):
        for a in range(n):
            (g, i, k), (h, j, q) = labels[a], labels[b]
            expected = 0.0
            if g == h and k == q:
                factor = factors[g]
                m = factor.dim_z
                left = factor.isometry[:, i * m:(i + 1) * m]
                right = factor.isometry[:, j * m:(j + 1) * m]
                expected = _outer_sum(factor.spectrum, left, right)
            image = unvec(images[:, a + b * n], phi.dim)
            worst = max(worst, float(np.linalg.norm(image - expected)))
    return worst


def cptp_structure(phi: SuperOperator, dec: BlockDecomposition, policy: TolerancePolicy) -> StructureReport:
    """
    Direct sum of tensor factors Id_{L(Y_i)} (x) Gamma^{rho_i} for a CPTP projection.

    The isometry of factor i has columns x_{j,k} at position j*m + k, with j
    the block within the class and k the eigenvector of rho_i.

    Raises:
        ContractViolation: phi is not completely positive
    """
    if not classify(phi, policy).completely_positive:
        raise ContractViolation.from_template("not_cp")
    report = global_structure(phi, dec, policy)
    if report.status != STATUS_CERTIFIED:
        return report

    shaped = all(summary.case == CASE_PARTITION and not summary.partition[1] for summary in report.classes)
    if not shaped:
        detail = "a completely positive map produced a Half or mixed Partition class"
        return report.model_copy(update={"status": STATUS_INCONSISTENT, "detail": detail})

    factors = []
    for summary in report.classes:
        isometry = np.hstack([report.aligned[index] for index in summary.blocks])
        factors.append(CptpFactor(dim_y=summary.l, dim_z=summary.m, spectrum=summary.spectrum, isometry=isometry))
    residual = _form_residual(phi, factors)
    fixed_dim = sum(factor.dim_y ** 2 for factor in factors)
    measured = fixed_space_basis(phi, policy).dim
    residuals = dict(report.residuals, cptp_form=residual)

    if measured != fixed_dim:
        detail = get_error_message("dimension_law", actual=measured, expected=fixed_dim)
        return report.model_copy(update={"status": STATUS_INCONSISTENT, "detail": detail, "residuals": residuals})
    if residual > policy.tol_cert:
        detail = f"CPTP form residual {residual:.3e} exceeds tol_cert"
        return report.model_copy(update={"status": STATUS_INCONSISTENT, "detail": detail, "residuals": residuals})

    form = CptpForm(factors=factors, residual=residual, fixed_dim=fixed_dim)
    logger.info(f"CPTP form with factors {[(f.dim_y, f.dim_z) for f in factors]}")
    return report.model_copy(update={"cptp_form": form, "residuals": residuals})


def fixed_space_from_form(report: StructureReport) -> List[np.ndarray]:
    """Operators sum_k r_k x_{i,k} x_{j,k}* spanning the fixed space, per factor and (i, j)."""
    if report.cptp_form is None:
        return []
    operators = []
    for factor in report.cptp_form.factors:
        m = factor.dim_z
        for i in range(factor.dim_y):
            for j in range(factor.dim_y):
                left = factor.isometry[:, i * m:(i + 1) * m]
                right = factor.isometry[:, j * m:(j + 1) * m]
                operators.append(_outer_sum(factor.spectrum, left, right))
    return operators


def degenerate_case_experiment(phi: SuperOperator, dec: BlockDecomposition,
                               policy: TolerancePolicy) -> List[Dict[str, object]]:
    """
    Record what the classifier sees on equivalent pairs with degenerate spectra.

    Outcomes are logged and returned, never asserted.
    """
    records = []
    for i, j in combinations(range(len(dec.blocks)), 2):
        first, second = dec.blocks[i], dec.blocks[j]
        if not equivalent_blocks(first, second, policy) or not is_degenerate(first.spectrum, policy.tol_spec):
            continue
        certificate = cross_block_certificate(phi, first, second, policy)
        record: Dict[str, object] = {"pair": f"{i}-{j}", "spectrum": first.spectrum, "cross_action": certificate is not None}
        if certificate is not None:
            r = np.asarray(certificate.r)
            alpha = _alpha(pair_images(phi, certificate.y, certificate.z), certificate.y, certificate.z, r)
            record.update({
                "violated": certificate.violated,
                "residuals": certificate.residuals,
                "alpha": np.round(alpha.real, 9).tolist()
            })
        logger.info(f"Degenerate-spectrum experiment: {record}")
        records.append(record)
    return records
