"""Random classes, constraint sets and inputs shared by the suites."""
from typing import Dict

import numpy as np

from genbound.exceptions import InvalidParameterError
from genbound.linalg import sample_ball
from genbound.schemas.attention import ConstraintSet, Corollary, SequenceBatch
from genbound.schemas.experiment import GridValue
from genbound.schemas.matrix import MatrixClassSpec, NormKind


def orthonormal_basis(rng: np.random.Generator, k: int, r: int) -> np.ndarray:
    """k×r matrix with orthonormal columns."""
    if not 1 <= r <= k:
        raise InvalidParameterError(f"need 1 <= r <= k, got r={r}, k={k}")
    Q, R = np.linalg.qr(rng.standard_normal((k, r)))
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def class_spec(kind: str, d: int, k: int, r_w: int, B_w: float, B_x: float,
               rng: np.random.Generator, p: float = 1.0) -> MatrixClassSpec:
    """A class over a fixed random r_w-dimensional column space."""
    norm_kind = NormKind(kind)
    E = orthonormal_basis(rng, k, r_w)
    rank_cap = min(r_w, d, k)
    if norm_kind == NormKind.BASIS_P1:
        return MatrixClassSpec(d=d, k=k, norm_kind=norm_kind, B_w=B_w, p=p, basis_E=E, B_x=B_x)
    if norm_kind == NormKind.TRANSPOSED_P1:
        return MatrixClassSpec(d=d, k=k, norm_kind=norm_kind, B_w=B_w, p=2.0, basis_E=E,
                               rank_cap=rank_cap, B_x=B_x)
    if norm_kind == NormKind.ENTRYWISE_PQ:
        return MatrixClassSpec(d=d, k=k, norm_kind=norm_kind, B_w=B_w, p=1.0, q=1.0, basis_E=E,
                               rank_cap=rank_cap, B_x=B_x, input_norm=1.0)
    return MatrixClassSpec(d=d, k=k, norm_kind=norm_kind, B_w=B_w, basis_E=E, rank_cap=rank_cap, B_x=B_x)


def constraint_set(params: Dict[str, GridValue], rng: np.random.Generator) -> ConstraintSet:
    """ConstraintSet for the corollary named in params (W_QK is d×d)."""
    corollary = Corollary(str(params["corollary"]))
    d = int(params["d"])
    r_w = min(int(params.get("r_w", d)), d)
    B_x, B_QK = float(params["B_x"]), float(params["B_QK"])

    if corollary == Corollary.MAIN1:
        qk = MatrixClassSpec(d=d, k=d, norm_kind=NormKind.BASIS_P1, B_w=B_QK, p=1.0,
                             basis_E=orthonormal_basis(rng, d, r_w), B_x=B_x, input_norm=1.0)
    elif corollary == Corollary.MAIN2:
        qk = MatrixClassSpec(d=d, k=d, norm_kind=NormKind.ENTRYWISE_PQ, B_w=B_QK, p=1.0, q=1.0,
                             B_x=B_x, input_norm=1.0)
    else:
        qk = MatrixClassSpec(d=d, k=d, norm_kind=NormKind.TRANSPOSED_21, B_w=B_QK,
                             basis_E=orthonormal_basis(rng, d, r_w), rank_cap=r_w, B_x=B_x)
    return ConstraintSet(B_w=float(params["B_w"]), B_Wc=float(params["B_Wc"]),
                         B_Wv=float(params["B_Wv"]), qk_constraint=qk)


def sequence_batch(c_set: ConstraintSet, n: int, T: int, rng: np.random.Generator) -> SequenceBatch:
    samples = sample_ball(rng, (n, T, c_set.d), c_set.B_x, c_set.input_norm)
    return SequenceBatch(samples=samples, B_x=c_set.B_x, input_norm=c_set.input_norm)
