"""
End-to-end analysis and verification of a channel.

analyze: classify -> spectral gate -> projection (when not idempotent) ->
fixed space -> block decomposition -> structure certification.
"""

import json
import logging
from typing import Any, Dict, List, Tuple

from config.fixedspace_config import (
    SPECTRAL_NORM_GATE, STATUS_CERTIFIED, STATUS_INCONSISTENT, VERDICT_FAIL, VERDICT_PASS
)
from functions.channel import classify
from functions.decompose import block_decomposition, verify_block_action
from functions.exceptions import FixedSpaceError, InputError, InternalInconsistency, NumericalFailure
from functions.oracles import sweep
from functions.projector import (
    cesaro_projection, fixed_space_basis, is_idempotent, spectral_norm_check, spectral_projection,
    spectral_radius
)
from functions.structure import cptp_structure, global_structure
from models.channel_models import SuperOperator
from models.report_models import AnalysisReport, LemmaVerdict, TolerancePolicy

logger = logging.getLogger(__name__)


def project_if_needed(psi: SuperOperator, policy: TolerancePolicy) -> Tuple[SuperOperator, List[str]]:
    """
    Return psi when idempotent, otherwise its projection onto the fixed space, with a note.

    The spectral projection is tried first; when its eigenspaces cannot be
    paired the Cesaro mean is used instead.

    Raises:
        NumericalFailure: the Cesaro fallback did not converge
    """
    if is_idempotent(psi, policy):
        return psi, []
    logger.info("Input is not idempotent; analysing its spectral projection")
    try:
        return spectral_projection(psi, policy), ["input was not idempotent; analysed its spectral projection"]
    except InternalInconsistency as e:
        if e.key != "singular_pairing":
            raise
        logger.warning(f"{e.detail}; falling back to the Cesaro mean")
    result = cesaro_projection(psi, policy)
    if not result.converged:
        raise NumericalFailure.from_template("cesaro_not_converged", terms=result.terms, residual=result.residual)
    return result.projection, [f"input was not idempotent; analysed its Cesaro projection ({result.terms} terms)"]


def analyze_channel(psi: SuperOperator, policy: TolerancePolicy, seed: int, samples: int) -> AnalysisReport:
    """
    Full structural analysis of a channel.

    Library errors other than InputError end the pipeline with status
    Inconsistent and a note naming the error.

    Args:
        psi: input super-operator
        policy: tolerance policy
        seed: seed for the falsifier and the minimum-rank fallback
        samples: positivity falsifier samples

    Returns:
        AnalysisReport
    """
    flags = classify(psi, policy, samples=samples, seed=seed)
    norm = spectral_norm_check(psi)
    radius = spectral_radius(psi)
    notes: List[str] = []
    if radius > SPECTRAL_NORM_GATE:
        notes.append(f"spectral radius {radius:.9f} exceeds 1; input is not PTP")

    residuals: Dict[str, float] = {}
    fixed_dim = 0
    blocks: List[Dict[str, Any]] = []
    structure = None
    projected = False
    try:
        phi, projection_notes = project_if_needed(psi, policy)
        projected = bool(projection_notes)
        notes.extend(projection_notes)
        fixed_dim = fixed_space_basis(psi, policy).dim

        dec = block_decomposition(phi, policy, seed)
        blocks = [{"dim": block.dim, "spectrum": block.spectrum} for block in dec.blocks]
        action = verify_block_action(phi, dec, policy)
        residuals.update(block_action=action.max_block_residual, cross_action=action.max_cross_residual)

        if classify(phi, policy).completely_positive:
            report = cptp_structure(phi, dec, policy)
        else:
            report = global_structure(phi, dec, policy)
        residuals.update(report.residuals)
        structure = report.summary()
        status = report.status
        if not action.passed:
            status = STATUS_INCONSISTENT
            notes.append("block action law violated beyond tol_cert")
        if report.detail:
            notes.append(report.detail)
    except InputError:
        raise
    except FixedSpaceError as e:
        logger.error(f"Analysis stopped: {e.detail}")
        status = STATUS_INCONSISTENT
        notes.append(f"{e.code}: {e.detail}")

    return AnalysisReport(
        seed=seed,
        tolerances=policy.model_dump(),
        flags=flags.to_dict(),
        spectral_norm=norm,
        spectral_radius=radius,
        projection_applied=projected,
        fixed_dim=fixed_dim,
        blocks=blocks,
        structure=structure,
        status=status,
        residuals=residuals,
        notes=notes
    )


def verify_channel(psi: SuperOperator, policy: TolerancePolicy, samples: int,
                   seed: int) -> Tuple[List[LemmaVerdict], List[str]]:
    """
    Oracle sweep over the projection of psi.

    Returns:
        (verdicts, notes); a library error becomes one failing "pipeline" verdict
    """
    notes: List[str] = []
    try:
        phi, notes = project_if_needed(psi, policy)
        dec = block_decomposition(phi, policy, seed)
        action = verify_block_action(phi, dec, policy)
        verdicts = [LemmaVerdict(
            lemma="block_action",
            status=VERDICT_PASS if action.passed else VERDICT_FAIL,
            residual=max(action.max_block_residual, action.max_cross_residual)
        )]
        structure = global_structure(phi, dec, policy)
        if structure.status != STATUS_CERTIFIED:
            notes.append(f"structure {structure.status}: {structure.detail}")
        verdicts.extend(sweep(phi, dec, structure, samples, seed, policy))
    except InputError:
        raise
    except FixedSpaceError as e:
        logger.error(f"Verification stopped: {e.detail}")
        verdicts = [LemmaVerdict(lemma="pipeline", status=VERDICT_FAIL, detail=f"{e.code}: {e.detail}")]
    return verdicts, notes


def has_failures(verdicts: List[LemmaVerdict]) -> bool:
    return any(verdict.status == VERDICT_FAIL for verdict in verdicts)


def format_report(report: AnalysisReport) -> str:
    """Canonical JSON text; identical reports give identical bytes."""
    return json.dumps(report.model_dump(mode="json", by_alias=True), indent=2, sort_keys=True)


def format_verdicts(verdicts: List[LemmaVerdict], notes: List[str], seed: int) -> str:
    """JSON lines: a header with notes, then one verdict per line."""
    lines = [json.dumps({"notes": notes, "seed": seed}, sort_keys=True)]
    lines.extend(json.dumps(verdict.model_dump(mode="json"), sort_keys=True) for verdict in verdicts)
    return "\n".join(lines)
