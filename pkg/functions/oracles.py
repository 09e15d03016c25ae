"""
Runnable checks of the supporting lemmas on a PTP projection.

Each check returns a LemmaVerdict. Lemmas are implications: when a
precondition does not hold the verdict is "skipped", never "fail".
"""

import logging
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.fixedspace_config import VERDICT_FAIL, VERDICT_PASS, VERDICT_SKIPPED
from functions.channel import apply
from functions.decompose import invariance_residuals
from functions.numerics import null_space_basis
from functions.structure import pair_images
from models.channel_models import BlockDecomposition, Subspace, SuperOperator
from models.report_models import CoefficientTable, LemmaVerdict, StructureReport, TolerancePolicy

logger = logging.getLogger(__name__)


def _verdict(lemma: str, passed: bool, residual: float, detail: Optional[str] = None) -> LemmaVerdict:
    return LemmaVerdict(lemma=lemma, status=VERDICT_PASS if passed else VERDICT_FAIL,
                        residual=float(residual), detail=detail)


def check_pos1(phi: SuperOperator, x: np.ndarray, y: np.ndarray, z: np.ndarray,
               policy: TolerancePolicy, detail: Optional[str] = None) -> LemmaVerdict:
    """
    z* Phi(x x*) z = 0 and z* Phi(y y*) z = 0 imply Phi(x y*) z = 0.

    Thresholds scale with the vector norms.
    """
    nx, ny, nz = (float(np.linalg.norm(v)) for v in (x, y, z))
    pre_x = abs(z.conj() @ apply(phi, np.outer(x, x.conj())) @ z)
    pre_y = abs(z.conj() @ apply(phi, np.outer(y, y.conj())) @ z)
    if pre_x > policy.tol_fixed * nx * nx * nz * nz or pre_y > policy.tol_fixed * ny * ny * nz * nz:
        return LemmaVerdict(lemma="pos1", status=VERDICT_SKIPPED, residual=float(max(pre_x, pre_y)), detail=detail)
    residual = float(np.linalg.norm(apply(phi, np.outer(x, y.conj())) @ z))
    return _verdict("pos1", residual <= policy.tol_cert * nx * ny * nz, residual, detail)


def check_pos2(phi: SuperOperator, x: np.ndarray, sub: Subspace, policy: TolerancePolicy,
               detail: Optional[str] = None) -> LemmaVerdict:
    """P_Z Phi(x x*) P_Z = 0 implies P_Z Phi(x y*) P_Z = 0 for every y."""
    projector = sub.projector()
    nx = float(np.linalg.norm(x))
    pre = float(np.linalg.norm(projector @ apply(phi, np.outer(x, x.conj())) @ projector))
    if pre > policy.tol_fixed * nx * nx:
        return LemmaVerdict(lemma="pos2", status=VERDICT_SKIPPED, residual=pre, detail=detail)
    residual = max(
        float(np.linalg.norm(projector @ apply(phi, np.outer(x, unit)) @ projector))
        for unit in np.eye(phi.dim)
    )
    return _verdict("pos2", residual <= policy.tol_cert * nx, residual, detail)


def check_invariance(phi: SuperOperator, sub: Subspace, policy: TolerancePolicy,
                     detail: Optional[str] = None) -> LemmaVerdict:
    """L(sub) is invariant: no basis image leaks out of sub on either side."""
    residuals = invariance_residuals(phi, sub)
    residual = float(residuals.max()) if residuals.size else 0.0
    return _verdict("invariance", residual <= policy.tol_cert, residual, detail)


def coefficient_table(phi: SuperOperator, y: np.ndarray, z: np.ndarray, r: Sequence[float],
                      policy: TolerancePolicy, detail: Optional[str] = None) -> Tuple[CoefficientTable, List[LemmaVerdict]]:
    """
    u, v tables of an aligned block pair and the coefficient-lemma verdicts.

    Verdicts:
        poshalf: u_ii^kk and v_ii^kk are real and lie in [0, r_k]
        cluu:    u_ij^kk + conj(v_ji^kk) = 0 for i != j
        nohalf:  u_ij^kk = 0 (i != j) whenever u_ii^kk != v_ii^kk or u_jj^kk != v_jj^kk
        weight:  w_ii^kk = r_k
    """
    r = np.asarray(r, dtype=float)
    m = len(r)
    u = np.einsum("ka,ijab,bl->ijkl", y.conj().T, pair_images(phi, y, z), z)
    v = np.einsum("ka,ijab,bl->ijkl", y.conj().T, pair_images(phi, z, y), z)
    table = CoefficientTable(m=m, u=u, v=v, r=[float(value) for value in r])
    tol = policy.tol_cert

    diag_u = np.array([[u[i, i, k, k] for k in range(m)] for i in range(m)])
    diag_v = np.array([[v[i, i, k, k] for k in range(m)] for i in range(m)])

    poshalf = 0.0
    for diag in (diag_u, diag_v):
        below = np.maximum(-diag.real, 0.0)
        above = np.maximum(diag.real - r[None, :], 0.0)
        poshalf = max(poshalf, float(np.max(below)), float(np.max(above)), float(np.max(np.abs(diag.imag))))

    cluu, nohalf = 0.0, 0.0
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            for k in range(m):
                cluu = max(cluu, abs(u[i, j, k, k] + np.conj(v[j, i, k, k])))
                split = (abs(diag_u[i, k] - diag_v[i, k]) > policy.tol_spec * r[k]
                         or abs(diag_u[j, k] - diag_v[j, k]) > policy.tol_spec * r[k])
                if split:
                    nohalf = max(nohalf, abs(u[i, j, k, k]))

    weight = float(np.max(np.abs(diag_u + diag_v - r[None, :])))
    verdicts = [
        _verdict("poshalf", poshalf <= tol, poshalf, detail),
        _verdict("cluu", cluu <= tol, float(cluu), detail),
        _verdict("nohalf", nohalf <= tol, float(nohalf), detail),
        _verdict("weight", weight <= tol, weight, detail),
    ]
    return table, verdicts


def _random_in(isometry: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    k = isometry.shape[1]
    coefficients = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    vector = isometry @ coefficients
    return vector / np.linalg.norm(vector)


def sweep(phi: SuperOperator, dec: BlockDecomposition, structure: Optional[StructureReport],
          samples: int, seed: int, policy: TolerancePolicy) -> List[LemmaVerdict]:
    """
    Deterministic probes of every oracle on one decomposed projection.

    pos1 draws x, y from blocks and z from a block differing from both or from
    the complement of the support; pos2 draws x from a block and takes another
    block as Z. Invariance is checked on every block, on the support, and on the
    complement of each block within the support. Coefficient tables are built
    for every certified connected pair.
    """
    rng = np.random.default_rng(seed)
    verdicts: List[LemmaVerdict] = []
    blocks = dec.blocks
    ambient = dec.ambient.isometry
    outside = null_space_basis(ambient.conj().T, policy) if ambient.shape[1] < phi.dim else None

    for _ in range(samples):
        a, b = int(rng.integers(len(blocks))), int(rng.integers(len(blocks)))
        others = [index for index in range(len(blocks)) if index not in (a, b)]
        if others and (outside is None or rng.uniform() < 0.5):
            c = others[int(rng.integers(len(others)))]
            z, target = _random_in(blocks[c].subspace.isometry, rng), f"block {c}"
        elif outside is not None:
            z, target = _random_in(outside, rng), "outside the support"
        else:
            z, target = _random_in(np.eye(phi.dim), rng), "anywhere"
        x = _random_in(blocks[a].subspace.isometry, rng)
        y = _random_in(blocks[b].subspace.isometry, rng)
        verdicts.append(check_pos1(phi, x, y, z, policy, detail=f"x in block {a}, y in block {b}, z {target}"))

    if len(blocks) > 1:
        for _ in range(samples):
            a = int(rng.integers(len(blocks)))
            others = [index for index in range(len(blocks)) if index != a]
            c = others[int(rng.integers(len(others)))]
            x = _random_in(blocks[a].subspace.isometry, rng)
            verdicts.append(check_pos2(phi, x, blocks[c].subspace, policy, detail=f"x in block {a}, Z = block {c}"))

    verdicts.append(check_invariance(phi, dec.ambient, policy, detail="support"))
    for index, block in enumerate(blocks):
        verdicts.append(check_invariance(phi, block.subspace, policy, detail=f"support of rho_{index}"))
        if len(blocks) > 1:
            coefficients = null_space_basis(block.subspace.isometry.conj().T @ ambient, policy)
            complement = Subspace(dim_ambient=phi.dim, isometry=ambient @ coefficients)
            verdicts.append(check_invariance(phi, complement, policy, detail=f"complement of block {index}"))

    if structure is not None:
        for summary in structure.classes:
            if summary.case is None or summary.l < 2:
                continue
            for a, b in combinations(summary.blocks, 2):
                if a not in structure.aligned or b not in structure.aligned:
                    continue
                _, table_verdicts = coefficient_table(
                    phi, structure.aligned[a], structure.aligned[b], summary.spectrum, policy,
                    detail=f"blocks {a}-{b}"
                )
                verdicts.extend(table_verdicts)

    failures = sum(verdict.status == VERDICT_FAIL for verdict in verdicts)
    logger.info(f"Oracle sweep: {len(verdicts)} verdicts, {failures} failures")
    return verdicts
