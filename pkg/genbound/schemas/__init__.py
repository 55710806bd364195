from genbound.schemas.matrix import MatrixClassSpec, NormKind, conjugate_exponent
from genbound.schemas.bound import BoundQuery, BoundResult, TheoremId, Regime
from genbound.schemas.maurey import ConvexRepresentation, SparseApprox
from genbound.schemas.covering import ImageCloud, CoverEstimate, CoverMethod
from genbound.schemas.attention import (
    Activation, Corollary, HeadParams, ConstraintSet, SequenceBatch
)
from genbound.schemas.complexity import (
    ChainingParams, RademacherEstimate, GapReport, BoundedLoss, LossKind, DudleySum, SyntheticTask
)
from genbound.schemas.experiment import (
    ExperimentConfig, ExperimentName, OutputFormat, ResultRow
)

__all__ = [
    "MatrixClassSpec", "NormKind", "conjugate_exponent",
    "BoundQuery", "BoundResult", "TheoremId", "Regime",
    "ConvexRepresentation", "SparseApprox",
    "ImageCloud", "CoverEstimate", "CoverMethod",
    "Activation", "Corollary", "HeadParams", "ConstraintSet", "SequenceBatch",
    "ChainingParams", "RademacherEstimate", "GapReport", "BoundedLoss", "LossKind",
    "DudleySum", "SyntheticTask",
    "ExperimentConfig", "ExperimentName", "OutputFormat", "ResultRow",
]
