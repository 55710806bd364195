from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List
import enum
import math

import numpy as np

from genbound.schemas.attention import HeadParams, SequenceBatch


class ChainingParams(BaseModel):
    """Constants of the chaining bound for a class with log N ≤ min{a ln(b/ε²), q²/ε²}."""

    a: float = Field(..., ge=0)
    b: float = Field(..., gt=0)
    q: float = Field(..., ge=0)
    eps0: float = Field(..., gt=0)
    B_x: float = Field(..., gt=0)
    prefactor: float = Field(..., ge=0)
    n: int = Field(..., ge=1)

    @model_validator(mode='after')
    def check_invariants(self):
        if self.eps0 > self.B_x * (1 + 1e-12):
            raise ValueError(f'eps0 = {self.eps0} exceeds B_x = {self.B_x}')
        worst = self.worst_violation()
        if worst is not None:
            raise ValueError(f'a·ln(b/ε²) > q²/ε² at ε = {worst:.6g} <= eps0')
        return self

    def worst_violation(self):
        """Largest grid ε ≤ eps0 where the volumetric regime exceeds q²/ε², else None."""
        eps = self.eps0 * np.logspace(0.0, -12.0, 241)
        volumetric = self.a * np.maximum(0.0, np.log(self.b / eps**2))
        maurey = self.q**2 / eps**2
        bad = volumetric > maurey * (1 + 1e-9) + 1e-12
        return float(eps[np.argmax(bad)]) if bad.any() else None

    @property
    def m0(self) -> int:
        """⌈log₂(B_x/ε₀)⌉, the last dyadic scale in the volumetric regime."""
        return max(0, math.ceil(math.log2(self.B_x / self.eps0) - 1e-12))


class RademacherEstimate(BaseModel):
    value: float
    n: int = Field(..., ge=1)
    sigma_draws: int = Field(..., ge=1)
    restarts: int = Field(..., ge=1)
    opt_steps: int = Field(..., ge=0)
    std_error: float = Field(0.0, ge=0)
    is_lower_bound: bool = True


class LossKind(str, enum.Enum):
    CLIPPED_SQUARED = "clipped_squared"
    CLIPPED_ABSOLUTE = "clipped_absolute"


class BoundedLoss(BaseModel):
    kind: LossKind = LossKind.CLIPPED_SQUARED
    c: float = Field(1.0, ge=0)  # loss cap


class GapReport(BaseModel):
    train_loss: float
    population_loss_estimate: float
    gap: float = Field(..., ge=0)
    bound: float
    rademacher_bound: float = Field(..., ge=0)
    c: float = Field(..., ge=0)
    delta: float = Field(..., gt=0, lt=1)
    n: int = Field(..., ge=1)
    holdout_se: float = Field(0.0, ge=0)

    @model_validator(mode='after')
    def bound_matches_formula(self):
        expected = 2 * self.rademacher_bound + 4 * self.c * math.sqrt(2 * math.log(4 / self.delta) / self.n)
        if not math.isclose(self.bound, expected, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError(f'bound {self.bound} != 2R + 4c√(2ln(4/δ)/n) = {expected}')
        return self

    def within_bound(self, slack_se: float = 0.0) -> bool:
        return self.gap <= self.bound + slack_se * self.holdout_se


class DudleySum(BaseModel):
    """Dyadic chaining sum at depth m, and the smallest sum over all depths searched."""

    value: float
    m: int = Field(..., ge=1)
    best: float
    best_m: int = Field(..., ge=1)


class SyntheticTask(BaseModel):
    planted: List[HeadParams]
    train: SequenceBatch
    train_labels: np.ndarray
    holdout: SequenceBatch
    holdout_labels: np.ndarray

    @field_validator('train_labels', 'holdout_labels', mode='before')
    @classmethod
    def as_labels(cls, v):
        return np.asarray(v, dtype=float).ravel()

    @model_validator(mode='after')
    def labels_match_batches(self):
        if len(self.train_labels) != self.train.n or len(self.holdout_labels) != self.holdout.n:
            raise ValueError('one label per sequence is required')
        return self

    class Config:
        arbitrary_types_allowed = True
