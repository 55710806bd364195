from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Optional
import enum
import math

import numpy as np

from genbound.config import get_settings


class NormKind(str, enum.Enum):
    SPECTRAL = "spectral_2to2"
    FROBENIUS = "frobenius"
    ENTRYWISE_PQ = "entrywise_pq"
    TRANSPOSED_21 = "transposed_21"
    TRANSPOSED_P1 = "transposed_p1"
    BASIS_P1 = "basis_p1"


def conjugate_exponent(p: float) -> float:
    """Hölder conjugate of p, with 1 and ∞ paired."""
    if not p >= 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def exponents_conjugate(p: float, q: float) -> bool:
    return math.isclose(conjugate_exponent(p), q, rel_tol=1e-12)


class MatrixClassSpec(BaseModel):
    """A constrained class of k×d matrices W : ℝ^d → ℝ^k, paired with an input ball."""

    d: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    norm_kind: NormKind
    B_w: float = Field(..., ge=0)
    p: Optional[float] = None  # entrywise_pq, transposed_p1, basis_p1
    q: Optional[float] = None  # entrywise_pq only
    rank_cap: Optional[int] = None
    basis_E: Optional[np.ndarray] = None  # k×m, orthonormal columns spanning V_w

    # Input ball the class is evaluated on
    B_x: float = Field(1.0, ge=0)
    input_norm: Optional[float] = None

    @field_validator('basis_E', mode='before')
    @classmethod
    def coerce_basis(cls, v):
        if v is None:
            return v
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or not np.all(np.isfinite(arr)):
            raise ValueError('basis_E must be a finite 2-D array')
        return arr

    @field_validator('p', 'q', 'input_norm')
    @classmethod
    def exponent_at_least_one(cls, v):
        if v is not None and not v >= 1:
            raise ValueError('norm exponents must be >= 1 or inf')
        return v

    @model_validator(mode='after')
    def check_class(self):
        if self.rank_cap is not None and not 1 <= self.rank_cap <= min(self.d, self.k):
            raise ValueError('rank_cap must lie in [1, min(d, k)]')

        if self.basis_E is not None:
            E = self.basis_E
            if E.shape[0] != self.k or E.shape[1] > self.k:
                raise ValueError(f'basis_E must be k×m with m <= k, got {E.shape}')
            gram = E.T @ E
            if E.shape[1] and np.max(np.abs(gram - np.eye(E.shape[1]))) > get_settings().orthonormal_tol:
                raise ValueError('basis_E columns must be orthonormal')

        kind = self.norm_kind
        if kind in (NormKind.TRANSPOSED_P1, NormKind.BASIS_P1, NormKind.ENTRYWISE_PQ) and self.p is None:
            raise ValueError(f'{kind.value} requires p')
        if kind == NormKind.ENTRYWISE_PQ:
            if self.q is None:
                raise ValueError('entrywise_pq requires q')
            # ‖W‖_F ≤ ‖W‖_{p,q} only for p, q ≤ 2
            if self.p > 2 or self.q > 2:
                raise ValueError('entrywise_pq classes need p, q <= 2')
        if kind == NormKind.BASIS_P1 and self.basis_E is None:
            raise ValueError('basis_p1 requires basis_E')

        # Largest input norm for which ‖Wx‖₂ ≤ B_w·B_x follows
        if kind in (NormKind.TRANSPOSED_P1, NormKind.BASIS_P1):
            widest = conjugate_exponent(self.p)
        elif kind == NormKind.TRANSPOSED_21:
            widest = math.inf
        else:
            widest = 2.0
        if self.input_norm is None:
            self.input_norm = widest
        elif self.input_norm > widest:
            raise ValueError(
                f'input_norm {self.input_norm} too weak for {kind.value}; need <= {widest}'
            )
        return self

    @property
    def subspace_dim(self) -> int:
        """Dimension of the fixed subspace V_w holding every column space."""
        if self.basis_E is not None:
            return int(self.basis_E.shape[1])
        return self.k

    @property
    def rank_bound(self) -> int:
        """Largest rank a member can have."""
        cap = self.rank_cap if self.rank_cap is not None else min(self.d, self.k)
        return min(cap, self.subspace_dim)

    @property
    def output_radius(self) -> float:
        return self.B_w * self.B_x

    class Config:
        arbitrary_types_allowed = True
