from pydantic import BaseModel, Field, field_validator, model_validator
import enum

import numpy as np

from genbound.schemas.matrix import MatrixClassSpec, NormKind


class Activation(str, enum.Enum):
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    TANH = "tanh"
    IDENTITY = "identity"


# σ(λu) = λσ(u) for λ ≥ 0
POSITIVELY_HOMOGENEOUS = {Activation.RELU, Activation.LEAKY_RELU, Activation.IDENTITY}


def activation_lipschitz(activation: Activation, slope: float = 0.01) -> float:
    if activation == Activation.LEAKY_RELU:
        return max(1.0, abs(slope))
    return 1.0


class Corollary(str, enum.Enum):
    MAIN1 = "cor_main1"  # ‖W_QKᵀE‖_{1,1} ≤ B_QK, ℓ₁ inputs
    MAIN2 = "cor_main2"  # ‖W_QK‖_{1,1} ≤ B_QK, ℓ₁ inputs
    COR18 = "cor_18"  # (2,1) norm with rank, ℓ_∞ inputs


class HeadParams(BaseModel):
    """One scalar-output attention head; W_QK d×d, W_v d×k, W_c k×d, w and x_cls in ℝ^d."""

    W_QK: np.ndarray
    W_v: np.ndarray
    W_c: np.ndarray
    w: np.ndarray
    x_cls: np.ndarray
    activation: Activation = Activation.RELU
    slope: float = 0.01  # leaky_relu only

    @field_validator('W_QK', 'W_v', 'W_c', 'w', 'x_cls', mode='before')
    @classmethod
    def as_float_array(cls, v):
        arr = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError('head parameters must be finite')
        return arr

    @model_validator(mode='after')
    def check_shapes(self):
        d = self.w.shape[0] if self.w.ndim == 1 else -1
        if d < 1 or self.x_cls.shape != (d,):
            raise ValueError('w and x_cls must be vectors of the same length d')
        if self.W_QK.shape != (d, d):
            raise ValueError(f'W_QK must be {d}×{d}, got {self.W_QK.shape}')
        if self.W_v.ndim != 2 or self.W_v.shape[0] != d:
            raise ValueError(f'W_v must be {d}×k, got {self.W_v.shape}')
        if self.W_c.shape != (self.W_v.shape[1], d):
            raise ValueError(f'W_c must be {self.W_v.shape[1]}×{d}, got {self.W_c.shape}')
        return self

    @property
    def d(self) -> int:
        return self.w.shape[0]

    @property
    def k(self) -> int:
        return self.W_v.shape[1]

    @property
    def lipschitz(self) -> float:
        return activation_lipschitz(self.activation, self.slope)

    class Config:
        arbitrary_types_allowed = True


class ConstraintSet(BaseModel):
    """Norm balls of the head class; the W_QK class constrains the map W_QKᵀ."""

    B_w: float = Field(..., ge=0)  # ‖w‖₁
    B_Wc: float = Field(..., ge=0)  # ‖W_cᵀ‖_{1,∞}
    B_Wv: float = Field(..., ge=0)  # ‖W_vᵀ‖_{1,∞}
    qk_constraint: MatrixClassSpec

    @field_validator('qk_constraint')
    @classmethod
    def square_supported_class(cls, v):
        if v.d != v.k:
            raise ValueError('qk_constraint must describe d×d matrices')
        if _corollary_for(v) is None:
            raise ValueError(
                'qk_constraint must be basis_p1(p=1) or entrywise (1,1) with ℓ₁ inputs, '
                'or transposed_21 with ℓ_∞ inputs'
            )
        return v

    @property
    def corollary(self) -> Corollary:
        return _corollary_for(self.qk_constraint)

    @property
    def B_x(self) -> float:
        return self.qk_constraint.B_x

    @property
    def input_norm(self) -> float:
        return self.qk_constraint.input_norm

    @property
    def B_QK(self) -> float:
        return self.qk_constraint.B_w

    @property
    def d(self) -> int:
        return self.qk_constraint.d

    @property
    def r_w(self) -> int:
        qk = self.qk_constraint
        if self.corollary == Corollary.MAIN2:
            return qk.d
        if qk.basis_E is not None:
            return qk.subspace_dim
        return qk.rank_cap if qk.rank_cap is not None else qk.d

    def prefactor(self, lipschitz: float = 1.0) -> float:
        return self.B_w * self.B_Wc * lipschitz * self.B_Wv

    class Config:
        arbitrary_types_allowed = True


def _corollary_for(spec: MatrixClassSpec):
    if spec.norm_kind == NormKind.BASIS_P1 and spec.p == 1 and spec.input_norm == 1:
        return Corollary.MAIN1
    if spec.norm_kind == NormKind.ENTRYWISE_PQ and spec.p == 1 and spec.q == 1 and spec.input_norm == 1:
        return Corollary.MAIN2
    if spec.norm_kind == NormKind.TRANSPOSED_21:
        return Corollary.COR18
    return None


class SequenceBatch(BaseModel):
    samples: np.ndarray  # n×T×d
    B_x: float = Field(..., ge=0)
    input_norm: float = Field(1.0, ge=1)

    @field_validator('samples', mode='before')
    @classmethod
    def as_batch(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 2:
            arr = arr[None, :, :]
        if arr.ndim != 3 or not np.all(np.isfinite(arr)):
            raise ValueError('samples must be a finite n×T×d array')
        return arr

    @model_validator(mode='after')
    def rows_in_ball(self):
        if self.samples.size:
            norms = np.linalg.norm(self.samples, ord=self.input_norm, axis=2)
            if norms.max() > self.B_x * (1 + 1e-9) + 1e-12:
                raise ValueError(f'a row has norm {norms.max():.6g} > B_x = {self.B_x}')
        return self

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def T(self) -> int:
        return self.samples.shape[1]

    @property
    def d(self) -> int:
        return self.samples.shape[2]

    class Config:
        arbitrary_types_allowed = True
