"""Closed-form log-covering-number bounds for linear classes.

Every value is ln 𝒩_∞ at radius ε for outputs measured in ‖·‖₂, clamped at 0.
All logarithms are natural.
"""
import logging
import math

from genbound.exceptions import DomainError, InvalidParameterError
from genbound.schemas.bound import BoundQuery, BoundResult, Regime, TheoremId
from genbound.schemas.matrix import MatrixClassSpec, NormKind

logger = logging.getLogger(__name__)


def clamped_log(x: float) -> float:
    """ln x for x > 1, else 0."""
    return math.log(x) if x > 1 else 0.0


def _ratio_sq(q: BoundQuery) -> float:
    if not q.eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {q.eps}")
    return (q.B_x * q.B_w / q.eps) ** 2


def _volumetric(q: BoundQuery, r: int) -> float:
    return 0.5 * r * clamped_log(4 * _ratio_sq(q) * r)


def _maurey(q: BoundQuery, r_outer: int, r_log: int) -> float:
    return r_outer * _ratio_sq(q) * math.log(2 * r_log + 1)


def bound_thm1(q: BoundQuery) -> BoundResult:
    """Spectral class with col(W) in a fixed r_w-dimensional subspace."""
    return BoundResult(log_cover=_volumetric(q, q.r_w), theorem_id=TheoremId.T1_VOLUMETRIC,
                       regime=Regime.VOLUMETRIC)


def bound_thm2(q: BoundQuery) -> BoundResult:
    """Frobenius class of rank at most r_w, ℓ₂ inputs."""
    return BoundResult(log_cover=_maurey(q, q.r_w, q.r_w), theorem_id=TheoremId.T2_FROB_RANK,
                       regime=Regime.MAUREY)


def bound_thm3(q: BoundQuery) -> BoundResult:
    """‖Wᵀ‖_{2,1} class of rank at most r_w, ℓ_∞ inputs."""
    return BoundResult(log_cover=_maurey(q, q.r_w, q.r_w), theorem_id=TheoremId.T3_21_RANK,
                       regime=Regime.MAUREY)


def bound_thm4(q: BoundQuery) -> BoundResult:
    """‖WᵀE‖_{p,1} class over an r_w-column basis E, ℓ_q inputs with 1/p + 1/q = 1."""
    return BoundResult(log_cover=_maurey(q, 1, q.r_w), theorem_id=TheoremId.T4_BASIS_P1,
                       regime=Regime.MAUREY)


def _require_dims(q: BoundQuery, *names: str) -> None:
    missing = [name for name in names if getattr(q, name) is None]
    if missing:
        raise InvalidParameterError(f"query needs {', '.join(missing)}")


def bound_cor_mind_k(q: BoundQuery) -> BoundResult:
    _require_dims(q, "d", "k")
    r = min(q.d, q.k)
    return BoundResult(log_cover=_maurey(q, r, r), theorem_id=TheoremId.C_MIND_K,
                       regime=Regime.MAUREY)


def bound_cor_p1_general(q: BoundQuery) -> BoundResult:
    _require_dims(q, "k")
    return BoundResult(log_cover=_maurey(q, 1, q.k), theorem_id=TheoremId.C_P1_GENERAL,
                       regime=Regime.MAUREY)


def bound_cor_11(q: BoundQuery) -> BoundResult:
    _require_dims(q, "k")
    return BoundResult(log_cover=_maurey(q, 1, q.k), theorem_id=TheoremId.C_11,
                       regime=Regime.MAUREY)


def bound_appF(q: BoundQuery) -> BoundResult:
    """Volumetric bound for the (2,1) class with ℓ_∞ inputs."""
    return BoundResult(log_cover=_volumetric(q, q.r_w), theorem_id=TheoremId.L_MAIN0_APPF,
                       regime=Regime.VOLUMETRIC)


def best_bound(q: BoundQuery, volumetric: BoundResult, maurey: BoundResult) -> BoundResult:
    """Pointwise minimum; ties go to the volumetric result."""
    if volumetric.regime != Regime.VOLUMETRIC or maurey.regime != Regime.MAUREY:
        raise InvalidParameterError("best_bound needs one volumetric and one Maurey result")
    return volumetric if volumetric.log_cover <= maurey.log_cover else maurey


def lemma_aux_check(c: float, y: float) -> bool:
    """Whether (c/2)·ln(4cy) < y·ln(2c+1).

    Holds for every y ≥ c; near y = c/2 it fails once 2c² ≥ 2c + 1.
    """
    if not c >= (math.e - 1) / 2:
        raise DomainError(f"c must be >= (e-1)/2, got {c}")
    if not y >= c / 2:
        raise DomainError(f"y must be >= c/2, got y={y}, c={c}")
    return 0.5 * c * math.log(4 * c * y) < y * math.log(2 * c + 1)


def lemma_aux2_check(q: BoundQuery) -> bool:
    """Whether the volumetric bound beats the rank-free Maurey form at q."""
    return bound_thm1(q).log_cover < bound_thm4(q).log_cover


def bound_multihead(single_head: float, heads: int) -> float:
    if heads < 1:
        raise InvalidParameterError(f"heads must be >= 1, got {heads}")
    return heads * single_head


def bound_for_spec(spec: MatrixClassSpec, eps: float) -> BoundResult:
    """Tightest theorem whose hypotheses the class satisfies.

    Every class keeps its image inside the B_w·B_x ball of the subspace V_w, so the
    volumetric bound always applies; the Maurey bound depends on the norm kind. The
    rank-dependent Maurey bounds use the rank bound, which never exceeds dim V_w.
    """
    q = BoundQuery(B_x=spec.B_x, B_w=spec.B_w, r_w=max(spec.subspace_dim, 1), eps=eps,
                   d=spec.d, k=spec.k)
    ranked = q.model_copy(update={"r_w": max(spec.rank_bound, 1)})
    kind = spec.norm_kind

    if kind == NormKind.SPECTRAL:
        return bound_thm1(q)
    if kind == NormKind.FROBENIUS:
        return best_bound(q, bound_thm1(q), bound_thm2(ranked))
    if kind == NormKind.TRANSPOSED_21:
        return best_bound(q, bound_appF(q), bound_thm3(ranked))
    if kind == NormKind.BASIS_P1:
        return best_bound(q, bound_thm1(q), bound_thm4(q))
    if kind == NormKind.TRANSPOSED_P1:
        return best_bound(q, bound_thm1(q), bound_cor_p1_general(q))
    if kind == NormKind.ENTRYWISE_PQ:
        if spec.p == 1 and spec.q == 1 and spec.input_norm == 1:
            return best_bound(q, bound_thm1(q), bound_cor_11(q))
        return bound_thm1(q)
    raise InvalidParameterError(f"no bound for norm kind {kind}")
