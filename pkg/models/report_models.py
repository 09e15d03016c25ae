"""
Pydantic models for policies, flags, certificates and JSON reports.
These models keep the command-line output format consistent.
"""

from typing import List, Optional, Dict, Any, Tuple, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.fixedspace_config import (
    MAX_TOLERANCE, SCHEMA_VERSION, TOOL_VERSION, ZOO_KINDS, CASE_PARTITION, STATUS_CERTIFIED
)
from models.channel_models import NumericModel

CaseKind = Literal["Zero", "Half", "Partition"]
StatusKind = Literal["Certified", "Undetermined", "Inconsistent"]
VerdictKind = Literal["pass", "fail", "skipped"]


class TolerancePolicy(BaseModel):
    """Tolerances every numerical decision inherits."""
    model_config = ConfigDict(frozen=True)

    tol_rank: float = Field(1e-9, description="Relative singular-value cutoff")
    tol_fixed: float = Field(1e-8, description="Fixed-point residual")
    tol_spec: float = Field(1e-7, description="Eigenvalue clustering width")
    tol_cert: float = Field(1e-6, description="Structure-residual acceptance")

    @field_validator("tol_rank", "tol_fixed", "tol_spec", "tol_cert")
    @classmethod
    def _check_range(cls, value: float) -> float:
        if not 0.0 < value < MAX_TOLERANCE:
            raise ValueError(f"tolerance must lie in (0, {MAX_TOLERANCE}), got {value}")
        return value


class PositivityWitness(NumericModel):
    """Unit vectors x, z with z* Psi(x x*) z = value < 0."""
    x: np.ndarray = Field(..., description="Input unit vector")
    z: np.ndarray = Field(..., description="Eigenvector of the negative eigenvalue")
    value: float = Field(..., description="Negative eigenvalue found")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": [[float(v.real), float(v.imag)] for v in self.x],
            "z": [[float(v.real), float(v.imag)] for v in self.z],
            "value": self.value
        }


class ChannelFlags(NumericModel):
    """Trace-preservation, Hermiticity-preservation and complete-positivity flags."""
    trace_preserving: bool = Field(..., description="Tr Psi(mu) = Tr mu")
    hermiticity_preserving: bool = Field(..., description="Psi(mu*) = Psi(mu)*")
    completely_positive: bool = Field(..., description="Choi matrix is PSD")
    choi_min_eigenvalue: float = Field(..., description="Smallest Choi eigenvalue")
    positivity_witness: Optional[PositivityWitness] = Field(None, description="Falsifier witness, if any")

    @model_validator(mode="after")
    def _check_witness(self):
        if self.completely_positive and self.positivity_witness is not None:
            raise ValueError("a completely positive map cannot carry a positivity witness")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trace_preserving": self.trace_preserving,
            "hermiticity_preserving": self.hermiticity_preserving,
            "completely_positive": self.completely_positive,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "positivity_witness": self.positivity_witness.to_dict() if self.positivity_witness else None
        }


class BlockActionReport(BaseModel):
    """Residuals of the within-block and cross-block action laws."""
    block_residuals: List[float] = Field(..., description="max ||Phi(E) - Tr(E) rho_i|| per block")
    cross_residuals: Dict[str, float] = Field(default_factory=dict, description="max ||Phi(E)|| per inequivalent pair")
    max_block_residual: float = Field(..., description="Largest within-block residual")
    max_cross_residual: float = Field(..., description="Largest cross-block residual")
    passed: bool = Field(..., description="Both maxima within tol_cert")


class CrossBlockCertificate(NumericModel):
    """SVD alignment of a nonzero Hermitian fixed point between two blocks."""
    m: int = Field(..., description="Common block dimension")
    c: float = Field(..., description="Scale of the singular values")
    r: List[float] = Field(..., description="Probability vector of normalized singular values")
    y: np.ndarray = Field(..., description="d x m left singular vectors (block Y)")
    z: np.ndarray = Field(..., description="d x m right singular vectors (block Z)")
    xi: np.ndarray = Field(..., description="Hermitian fixed point found by the search")
    residuals: Dict[str, float] = Field(..., description="Residuals of the f1, f2, f3 equalities")
    violated: Optional[str] = Field(None, description="Tag of the first violated equality")


class CrossBlockCase(NumericModel):
    """Half / Partition / Zero classification of the action between two blocks."""
    kind: Optional[CaseKind] = Field(None, description="Zero, Half or Partition; None when not certified")
    partition: Optional[Tuple[List[int], List[int]]] = Field(None, description="(S0, S1), zero-based")
    c: Optional[float] = Field(None, description="Scale of the aligned singular values")
    r: Optional[List[float]] = Field(None, description="Shared spectrum")
    y: Optional[np.ndarray] = Field(None, description="Aligned basis of block Y")
    z: Optional[np.ndarray] = Field(None, description="Aligned basis of block Z")
    residual: float = Field(0.0, description="Largest action residual checked")
    status: StatusKind = Field(STATUS_CERTIFIED, description="Certification status of the pair")
    detail: Optional[str] = Field(None, description="Why the pair is not certified")

    @model_validator(mode="after")
    def _check_partition(self):
        if self.kind == CASE_PARTITION and self.partition is not None and self.r is not None:
            s0, s1 = self.partition
            if set(s0) & set(s1) or sorted(s0 + s1) != list(range(len(self.r))):
                raise ValueError("partition must split the index range disjointly")
        return self


class ClassSummary(BaseModel):
    """One connectivity class of equivalent blocks."""
    blocks: List[int] = Field(..., description="Indices of the blocks in the class")
    case: Optional[CaseKind] = Field(None, description="Uniform case of the class; None when not certified")
    partition: Optional[Tuple[List[int], List[int]]] = Field(None, description="Shared (S0, S1)")
    spectrum: List[float] = Field(..., description="Shared spectrum r")
    l: int = Field(..., description="Class size")
    m: int = Field(..., description="Block dimension")


class CptpFactor(NumericModel):
    """One summand Y_i (x) Z_i of the CPTP form with its density rho_i."""
    dim_y: int = Field(..., description="dim Y_i (class size)")
    dim_z: int = Field(..., description="dim Z_i (block dimension)")
    spectrum: List[float] = Field(..., description="Eigenvalues of rho_i")
    isometry: np.ndarray = Field(..., description="W mapping Y_i (x) Z_i into the ambient space")


class CptpForm(NumericModel):
    """Direct sum of tensor factors Id_{L(Y_i)} (x) Gamma^{rho_i}."""
    factors: List[CptpFactor] = Field(..., description="Summands in class order")
    residual: float = Field(..., description="Largest ||Phi(E) - form(E)|| over a basis of L(X)")
    fixed_dim: int = Field(..., description="Sum of (dim Y_i)^2")


class StructureReport(NumericModel):
    """Classes, per-class case and, for CPTP maps, the factorization."""
    classes: List[ClassSummary] = Field(default_factory=list, description="Connectivity classes")
    pair_cases: Dict[str, str] = Field(default_factory=dict, description="Case per connected pair 'i-j'")
    aligned: Dict[int, np.ndarray] = Field(default_factory=dict, description="Aligned basis per block index")
    cptp_form: Optional[CptpForm] = Field(None, description="CPTP factorization when certified")
    status: StatusKind = Field(STATUS_CERTIFIED, description="Certified, Undetermined or Inconsistent")
    detail: Optional[str] = Field(None, description="Reason for a non-certified status")
    residuals: Dict[str, float] = Field(default_factory=dict, description="Largest residual per check")

    @model_validator(mode="after")
    def _check_form(self):
        if self.cptp_form is not None:
            if any(summary.case != CASE_PARTITION or (summary.partition and summary.partition[1])
                   for summary in self.classes):
                raise ValueError("a CPTP form requires every class to be Partition with empty S1")
        return self

    def summary(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "detail": self.detail,
            "classes": [summary.model_dump() for summary in self.classes],
            "cptp_form": None if self.cptp_form is None else {
                "factors": [
                    {"dim_y": f.dim_y, "dim_z": f.dim_z, "spectrum": f.spectrum}
                    for f in self.cptp_form.factors
                ],
                "residual": self.cptp_form.residual,
                "fixed_dim": self.cptp_form.fixed_dim
            }
        }


class CoefficientTable(NumericModel):
    """u, v, w coefficient tables of a certified block pair, indexed [i, j, k, l]."""
    m: int = Field(..., description="Block dimension")
    u: np.ndarray = Field(..., description="u[i,j,k,l] = y_k* Phi(y_i z_j*) z_l")
    v: np.ndarray = Field(..., description="v[i,j,k,l] = y_k* Phi(z_i y_j*) z_l")
    r: List[float] = Field(..., description="Spectrum of the pair")

    @property
    def w(self) -> np.ndarray:
        return self.u + self.v

    def alpha(self) -> np.ndarray:
        """alpha[i, k] = u_{i,i}^{k,k} / r_k."""
        diag = np.array([[self.u[i, i, k, k] for k in range(self.m)] for i in range(self.m)])
        return (diag / np.asarray(self.r)[None, :]).real


class LemmaVerdict(BaseModel):
    """Outcome of one lemma oracle evaluation."""
    lemma: str = Field(..., description="Oracle name")
    status: VerdictKind = Field(..., description="pass, fail or skipped")
    residual: Optional[float] = Field(None, description="Checked residual")
    detail: Optional[str] = Field(None, description="Probe description")


class ZooSpec(BaseModel):
    """Parameters of a generated channel or projector."""
    kind: str = Field(..., description="Generator kind")
    dim: Optional[int] = Field(None, ge=1, description="Dimension d")
    p: Optional[float] = Field(None, ge=0.0, le=1.0, description="Noise parameter")
    phases: Optional[List[float]] = Field(None, description="Eigenphases of a diagonal unitary")
    unitary: Optional[List[List[Tuple[float, float]]]] = Field(None, description="Explicit unitary matrix, entries [re, im]")
    blocks: Optional[List[Tuple[int, List[float]]]] = Field(None, description="(dim Y_i, spectrum_i) list")
    m: Optional[int] = Field(None, ge=1, description="Block dimension of a spec-case projector")
    r: Optional[List[float]] = Field(None, description="Spectrum of a spec-case projector")
    case: Optional[Literal["Half", "Partition"]] = Field(None, description="Spec-case kind")
    partition: Optional[Tuple[List[int], List[int]]] = Field(None, description="(S0, S1), zero-based")
    l: Optional[int] = Field(None, ge=1, description="Number of blocks in a spec-case class")
    pad: int = Field(0, ge=0, description="Extra ambient dimensions carrying a depolarizing block")
    transient: int = Field(0, ge=0, description="Extra ambient dimensions drained into the first block")
    factors: Optional[List[Tuple[int, int]]] = Field(None, description="(dim Y_i, dim Z_i) of a structured channel")
    rotate: bool = Field(False, description="Conjugate the result by a Haar-random unitary")
    kraus_count: Optional[int] = Field(None, ge=1, description="Number of Kraus operators")
    seed: Optional[int] = Field(None, description="Random seed")

    @field_validator("kind")
    @classmethod
    def _check_kind(cls, value: str) -> str:
        value = value.replace("-", "_")
        if value not in ZOO_KINDS:
            raise ValueError(f"unknown kind {value}")
        return value

    @field_validator("blocks")
    @classmethod
    def _check_blocks(cls, value):
        if value is None:
            return value
        for dim_y, spectrum in value:
            if dim_y < 1 or not spectrum:
                raise ValueError("blocks need dim Y >= 1 and a nonempty spectrum")
            if any(entry <= 0 for entry in spectrum) or abs(sum(spectrum) - 1.0) > 1e-12:
                raise ValueError("spectra must be positive and sum to 1")
        return value


class ChannelFileModel(BaseModel):
    """JSON channel format: exactly one of kraus, choi, natural."""
    dim: int = Field(..., gt=0, description="Dimension d")
    kraus: Optional[List[List[List[Tuple[float, float]]]]] = Field(None, description="Kraus operators")
    choi: Optional[List[List[Tuple[float, float]]]] = Field(None, description="Choi matrix")
    natural: Optional[List[List[Tuple[float, float]]]] = Field(None, description="Natural matrix")

    @model_validator(mode="after")
    def _check_single_source(self):
        present = [name for name in ("kraus", "choi", "natural") if getattr(self, name) is not None]
        if len(present) != 1:
            raise ValueError(f"exactly one of kraus, choi, natural is required, got {present or 'none'}")
        return self


class AnalysisReport(BaseModel):
    """End-to-end report of the analyze command."""
    schema_version: int = Field(SCHEMA_VERSION, alias="schema", description="Report schema version")
    tool_version: str = Field(TOOL_VERSION, description="Tool version")
    seed: int = Field(..., description="Seed used")
    tolerances: Dict[str, float] = Field(..., description="Tolerances used")
    flags: Dict[str, Any] = Field(..., description="Channel flags of the input")
    spectral_norm: float = Field(..., description="Largest singular value of the natural matrix")
    spectral_radius: float = Field(..., description="Largest eigenvalue modulus of the natural matrix")
    projection_applied: bool = Field(..., description="Input was not idempotent and was projected first")
    fixed_dim: int = Field(..., description="Dimension of the fixed space")
    blocks: List[Dict[str, Any]] = Field(default_factory=list, description="(dim, spectrum) per block")
    structure: Optional[Dict[str, Any]] = Field(None, description="Structure report summary")
    status: StatusKind = Field(..., description="Certified, Undetermined or Inconsistent")
    residuals: Dict[str, float] = Field(default_factory=dict, description="Largest residual per check")
    notes: List[str] = Field(default_factory=list, description="Pipeline notes")

    model_config = ConfigDict(populate_by_name=True)
