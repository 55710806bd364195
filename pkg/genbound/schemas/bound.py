from pydantic import BaseModel, Field
from typing import Optional
import enum


class TheoremId(str, enum.Enum):
    T1_VOLUMETRIC = "T1_volumetric"
    T2_FROB_RANK = "T2_frob_rank"
    T3_21_RANK = "T3_21_rank"
    T4_BASIS_P1 = "T4_basis_p1"
    C_MIND_K = "C_mind_k"
    C_P1_GENERAL = "C_p1_general"
    C_11 = "C_11"
    L_MAIN0_APPF = "L_main0_appF"


class Regime(str, enum.Enum):
    VOLUMETRIC = "volumetric"
    MAUREY = "maurey"


class BoundQuery(BaseModel):
    B_x: float = Field(..., ge=0)
    B_w: float = Field(..., ge=0)
    r_w: int = Field(..., ge=1)
    eps: float = Field(..., gt=0)
    d: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=1)


class BoundResult(BaseModel):
    log_cover: float = Field(..., ge=0)
    theorem_id: TheoremId
    regime: Regime
