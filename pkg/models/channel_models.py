"""
Pydantic models for the numeric containers of the toolkit.
Matrices are dense complex numpy arrays, frozen after validation.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.fixedspace_config import ISOMETRY_TOL, REPRESENTATION_TOL, HERMITIAN_TOL


def _frozen_array(value, dtype=complex) -> np.ndarray:
    array = np.array(value, dtype=dtype)
    if not np.all(np.isfinite(array)):
        raise ValueError("entries must be finite")
    array.flags.writeable = False
    return array


class NumericModel(BaseModel):
    """Base for models that carry numpy arrays."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class SuperOperator(NumericModel):
    """Linear map on d x d operators, stored by its column-stacking natural matrix."""
    dim: int = Field(..., gt=0, description="Dimension d of the underlying space")
    natural: np.ndarray = Field(..., description="d^2 x d^2 natural matrix, N vec(mu) = vec(Psi(mu))")
    kraus: Optional[List[np.ndarray]] = Field(None, description="Kraus operators when known")
    choi: Optional[np.ndarray] = Field(None, description="Choi matrix J(Psi)")

    @field_validator("natural", "choi", mode="before")
    @classmethod
    def _to_array(cls, value):
        return None if value is None else _frozen_array(value)

    @field_validator("kraus", mode="before")
    @classmethod
    def _to_kraus(cls, value):
        return None if value is None else [_frozen_array(op) for op in value]

    @model_validator(mode="after")
    def _check_representations(self):
        d2 = self.dim * self.dim
        if self.natural.shape != (d2, d2):
            raise ValueError(f"natural must be {d2}x{d2}, got {self.natural.shape}")
        scale = max(1.0, float(np.linalg.norm(self.natural)))
        if self.kraus is not None:
            if not self.kraus or any(op.shape != (self.dim, self.dim) for op in self.kraus):
                raise ValueError(f"kraus operators must be {self.dim}x{self.dim}")
            from_kraus = sum(np.kron(op.conj(), op) for op in self.kraus)
            if np.linalg.norm(from_kraus - self.natural) > REPRESENTATION_TOL * scale:
                raise ValueError("kraus operators disagree with the natural matrix")
        if self.choi is not None:
            if self.choi.shape != (d2, d2):
                raise ValueError(f"choi must be {d2}x{d2}, got {self.choi.shape}")
            n4 = self.natural.reshape(self.dim, self.dim, self.dim, self.dim)
            expected = np.einsum("kilj->ijkl", n4).reshape(d2, d2)
            if np.linalg.norm(expected - self.choi) > REPRESENTATION_TOL * scale:
                raise ValueError("choi matrix disagrees with the natural matrix")
        return self


class Subspace(NumericModel):
    """Subspace of C^d given by an isometry with orthonormal columns."""
    dim_ambient: int = Field(..., gt=0, description="Ambient dimension d")
    isometry: np.ndarray = Field(..., description="d x r matrix with orthonormal columns")

    @field_validator("isometry", mode="before")
    @classmethod
    def _to_array(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_isometry(self):
        if self.isometry.ndim != 2 or self.isometry.shape[0] != self.dim_ambient:
            raise ValueError(f"isometry must have {self.dim_ambient} rows, got {self.isometry.shape}")
        r = self.isometry.shape[1]
        gram = self.isometry.conj().T @ self.isometry
        if np.linalg.norm(gram - np.eye(r)) > ISOMETRY_TOL * max(1, r):
            raise ValueError("isometry columns are not orthonormal")
        return self

    @property
    def dim(self) -> int:
        return self.isometry.shape[1]

    def projector(self) -> np.ndarray:
        return self.isometry @ self.isometry.conj().T

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(dim_ambient=dim, isometry=np.eye(dim))


class FixedSpace(NumericModel):
    """Hilbert-Schmidt orthonormal basis of the fixed points of a map."""
    dim_ambient: int = Field(..., gt=0, description="Ambient dimension d")
    basis: List[np.ndarray] = Field(default_factory=list, description="d x d basis operators")
    residual: float = Field(0.0, ge=0, description="||Psi(F) - F||_F summed in quadrature over the basis")

    @field_validator("basis", mode="before")
    @classmethod
    def _to_arrays(cls, value):
        return [_frozen_array(op) for op in value]

    @model_validator(mode="after")
    def _check_orthonormal(self):
        shape = (self.dim_ambient, self.dim_ambient)
        if any(op.shape != shape for op in self.basis):
            raise ValueError(f"basis operators must be {shape[0]}x{shape[1]}")
        k = len(self.basis)
        vectors = self.vectors()
        if np.linalg.norm(vectors.conj().T @ vectors - np.eye(k)) > ISOMETRY_TOL * max(1, k):
            raise ValueError("basis is not Hilbert-Schmidt orthonormal")
        return self

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vectors(self) -> np.ndarray:
        """Basis as columns of a d^2 x k matrix (column-stacking)."""
        d2 = self.dim_ambient * self.dim_ambient
        if not self.basis:
            return np.zeros((d2, 0), dtype=complex)
        return np.column_stack([op.reshape(-1, order="F") for op in self.basis])


class Block(NumericModel):
    """One block X_i with its full-rank density operator rho_i."""
    subspace: Subspace = Field(..., description="Block subspace X_i")
    rho: np.ndarray = Field(..., description="Density operator in the isometry's column basis")
    spectrum: List[float] = Field(..., description="Eigenvalues of rho, descending")

    @field_validator("rho", mode="before")
    @classmethod
    def _to_array(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_density(self):
        r = self.subspace.dim
        if self.rho.shape != (r, r):
            raise ValueError(f"rho must be {r}x{r}, got {self.rho.shape}")
        if np.linalg.norm(self.rho - self.rho.conj().T) > HERMITIAN_TOL:
            raise ValueError("rho must be Hermitian")
        if abs(np.trace(self.rho) - 1.0) > 1e-10:
            raise ValueError("rho must have unit trace")
        if len(self.spectrum) != r or any(value <= 0 for value in self.spectrum):
            raise ValueError("spectrum must list dim positive eigenvalues")
        return self

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def ambient_rho(self) -> np.ndarray:
        iso = self.subspace.isometry
        return iso @ self.rho @ iso.conj().T


class BlockDecomposition(NumericModel):
    """Ordered blocks X_1..X_l dividing the support X."""
    blocks: List[Block] = Field(default_factory=list, description="Blocks in canonical order")
    ambient: Subspace = Field(..., description="Support X of the projection")

    @property
    def dims(self) -> List[int]:
        return [block.dim for block in self.blocks]


class CesaroResult(NumericModel):
    """Cesaro mean of the powers of a map."""
    projection: SuperOperator = Field(..., description="Averaged map")
    terms: int = Field(..., description="Number of averaged powers M")
    residual: float = Field(..., description="Idempotence residual of the average")
    converged: bool = Field(..., description="Residual met the target")
