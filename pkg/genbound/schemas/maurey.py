from pydantic import BaseModel, Field, field_validator, model_validator

import numpy as np


class ConvexRepresentation(BaseModel):
    """f = Σ w_j g_j with Σ w_j ≤ 1 and every ‖g_j‖₂ ≤ b."""

    atoms: np.ndarray  # m×k, one atom per row
    weights: np.ndarray  # m
    b: float = Field(..., ge=0)
    target: np.ndarray  # k

    @field_validator('atoms', 'weights', 'target', mode='before')
    @classmethod
    def as_float_array(cls, v):
        return np.asarray(v, dtype=float)

    @model_validator(mode='after')
    def check_representation(self):
        k = self.target.shape[0]
        if self.atoms.ndim != 2 or self.atoms.shape != (self.weights.shape[0], k):
            raise ValueError(
                f'atoms must be {self.weights.shape[0]}×{k}, got {self.atoms.shape}'
            )
        if np.any(self.weights < 0):
            raise ValueError('weights must be nonnegative')
        if self.weights.sum() > 1 + 1e-12:
            raise ValueError(f'weights sum to {self.weights.sum()} > 1')
        scale = max(1.0, self.b)
        if len(self.weights) and np.max(np.linalg.norm(self.atoms, axis=1)) > self.b + 1e-12 * scale:
            raise ValueError('atom norm exceeds b')
        residual = np.linalg.norm(self.weights @ self.atoms - self.target) if len(self.weights) else np.linalg.norm(self.target)
        if residual > 1e-10 * scale:
            raise ValueError(f'atoms do not reconstruct the target (residual {residual:.3g})')
        return self

    @property
    def alpha(self) -> float:
        return float(self.weights.sum())

    class Config:
        arbitrary_types_allowed = True


class SparseApprox(BaseModel):
    counts: np.ndarray  # nonnegative integers, one per atom
    t: int = Field(..., ge=1)
    approx: np.ndarray
    sq_error: float = Field(..., ge=0)
    bound: float  # (α b² − ‖f‖²)/t

    @model_validator(mode='after')
    def check_counts(self):
        if np.any(self.counts < 0) or self.counts.sum() > self.t:
            raise ValueError('counts must be nonnegative with sum <= t')
        return self

    class Config:
        arbitrary_types_allowed = True
