from pydantic import BaseModel, Field, field_validator
from typing import Optional
import enum

import numpy as np

from genbound.schemas.matrix import MatrixClassSpec


class CoverMethod(str, enum.Enum):
    GREEDY_INTERNAL = "greedy_internal"
    EXACT_MIN = "exact_min"
    VOLUMETRIC_GRID = "volumetric_grid"


class ImageCloud(BaseModel):
    points: np.ndarray  # N×k
    source_spec: Optional[MatrixClassSpec] = None
    n_inputs: int = Field(0, ge=0)
    n_matrices: int = Field(0, ge=0)

    @field_validator('points', mode='before')
    @classmethod
    def as_point_matrix(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or not np.all(np.isfinite(arr)):
            raise ValueError('points must be a finite N×k array')
        return arr

    def __len__(self):
        return self.points.shape[0]

    class Config:
        arbitrary_types_allowed = True


class CoverEstimate(BaseModel):
    centers: np.ndarray
    eps: float = Field(..., gt=0)
    size: int = Field(..., ge=0)
    method: CoverMethod
    center_indices: Optional[np.ndarray] = None  # internal covers only

    class Config:
        arbitrary_types_allowed = True
