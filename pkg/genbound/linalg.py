"""Dense norms, numerical rank, column-space bases and class sampling.

Matrices W : ℝ^d → ℝ^k are stored k×d, so column W[:, l] multiplies x_l.
"""
from typing import List, Optional
import logging
import math

import numpy as np

from genbound.config import get_settings
from genbound.exceptions import InfeasibleSpecError, InvalidParameterError, NumericFailureError
from genbound.schemas.matrix import MatrixClassSpec, NormKind, conjugate_exponent

logger = logging.getLogger(__name__)

__all__ = [
    "as_vector", "as_matrix", "vec_norm", "entrywise_norm", "spectral_norm",
    "numerical_rank", "colspace_basis", "orthonormal_residual", "class_norm",
    "check_class_member", "sample_class_member", "project_to_class", "conjugate_exponent",
    "sample_ball",
]


def _check_exponent(p: float, name: str = "p") -> None:
    if not p >= 1:  # also rejects NaN
        raise InvalidParameterError(f"{name} must be >= 1 or inf, got {p}")


def as_vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InvalidParameterError(f"expected a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("vector has non-finite entries")
    return arr


def as_matrix(A) -> np.ndarray:
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2:
        raise InvalidParameterError(f"expected a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("matrix has non-finite entries")
    return arr


def vec_norm(x, p: float) -> float:
    """ℓ_p norm; p = inf gives the max magnitude."""
    _check_exponent(p)
    x = as_vector(x)
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, ord=p))


def entrywise_norm(A, p: float, q: float) -> float:
    """ℓ_q norm of the vector of column ℓ_p norms (sum of column p-norms for q = 1)."""
    _check_exponent(p)
    _check_exponent(q, "q")
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    column_norms = np.linalg.norm(A, ord=p, axis=0)
    return float(np.linalg.norm(column_norms, ord=q))


def spectral_norm(A, tol: Optional[float] = None, max_iter: Optional[int] = None) -> float:
    """Largest singular value by power iteration on the smaller Gram matrix G.

    Each sweep applies the current power P = G^(2^j) and then squares it, so the
    exponent doubles per step and nearly tied top singular values still separate
    within a few dozen sweeps. Iteration stops on the eigen-residual
    ‖Gv − ρv‖ ≤ tol·ρ, which bounds the error of the Rayleigh quotient ρ itself.
    """
    settings = get_settings()
    tol = settings.spectral_tol if tol is None else tol
    max_iter = settings.spectral_max_iter if max_iter is None else max_iter
    A = as_matrix(A)
    if A.size == 0 or not np.any(A):
        return 0.0

    gram = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
    scale = float(np.linalg.norm(gram))
    gram = gram / scale
    power = gram.copy()
    # Fixed generic start vector keeps the result deterministic
    v = np.random.default_rng(0).standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    for iteration in range(1, max_iter + 1):
        u = power @ v
        norm_u = np.linalg.norm(u)
        if norm_u == 0.0:
            # v fell into the null space; restart from the power's largest column
            u = power[:, int(np.argmax(np.linalg.norm(power, axis=0)))]
            norm_u = np.linalg.norm(u)
        v = u / norm_u
        gv = gram @ v
        rho = float(v @ gv)
        residual = float(np.linalg.norm(gv - rho * v))
        if rho > 0.0 and residual <= tol * rho:
            logger.debug("power iteration converged after %d sweeps", iteration)
            return math.sqrt(rho * scale)
        power = power @ power
        power /= np.linalg.norm(power)
    raise NumericFailureError(f"power iteration did not converge in {max_iter} steps")


def numerical_rank(A, tol: Optional[float] = None) -> int:
    tol = get_settings().rank_tol if tol is None else tol
    A = as_matrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def colspace_basis(A, tol: Optional[float] = None) -> np.ndarray:
    """Orthonormal columns spanning col(A) at relative tolerance tol."""
    A = as_matrix(A)
    r = numerical_rank(A, tol)
    if r == 0:
        return np.zeros((A.shape[0], 0))
    U, _, _ = np.linalg.svd(A, full_matrices=False)
    return U[:, :r]


def orthonormal_residual(E) -> float:
    E = as_matrix(E)
    return float(np.max(np.abs(E.T @ E - np.eye(E.shape[1])))) if E.shape[1] else 0.0


def class_norm(W, spec: MatrixClassSpec) -> float:
    """The norm the class bounds by B_w."""
    W = as_matrix(W)
    kind = spec.norm_kind
    if kind == NormKind.SPECTRAL:
        return spectral_norm(W)
    if kind == NormKind.FROBENIUS:
        return float(np.linalg.norm(W))
    if kind == NormKind.ENTRYWISE_PQ:
        return entrywise_norm(W, spec.p, spec.q)
    if kind == NormKind.TRANSPOSED_21:
        return entrywise_norm(W, 2, 1)  # sum of column 2-norms
    if kind == NormKind.TRANSPOSED_P1:
        return entrywise_norm(W.T, spec.p, 1)  # sum of row p-norms
    if kind == NormKind.BASIS_P1:
        return entrywise_norm(W.T @ spec.basis_E, spec.p, 1)
    raise InvalidParameterError(f"unknown norm kind {kind}")


def check_class_member(W, spec: MatrixClassSpec, rtol: float = 1e-9) -> List[str]:
    """Names of the constraints W violates; empty when W belongs to the class."""
    W = as_matrix(W)
    violations = []
    if W.shape != (spec.k, spec.d):
        return [f"shape {W.shape} != {(spec.k, spec.d)}"]
    scale = max(1.0, float(np.linalg.norm(W)))
    if class_norm(W, spec) > spec.B_w * (1 + rtol) + rtol:
        violations.append("norm")
    if numerical_rank(W) > spec.rank_bound:
        violations.append("rank")
    if spec.basis_E is not None:
        E = spec.basis_E
        if np.linalg.norm(E @ (E.T @ W) - W) > rtol * scale:
            violations.append("subspace")
    return violations


def sample_class_member(spec: MatrixClassSpec, seed: int) -> np.ndarray:
    """Random member: Gaussian low-rank factors scaled to radius·B_w, radius ~ U(0, 1]."""
    if spec.B_w == 0:
        return np.zeros((spec.k, spec.d))
    r = spec.rank_bound
    if r < 1:
        raise InfeasibleSpecError("class admits no nonzero member: subspace has dimension 0")

    rng = np.random.default_rng(seed)
    if spec.basis_E is not None:
        left = spec.basis_E @ rng.standard_normal((spec.basis_E.shape[1], r))
    else:
        left = rng.standard_normal((spec.k, r))
    W = left @ rng.standard_normal((r, spec.d))

    norm = class_norm(W, spec)
    if norm == 0.0:
        raise InfeasibleSpecError("sampled factors collapsed to zero")
    radius = 1.0 - rng.uniform()  # (0, 1]
    return W * (spec.B_w * radius / norm)


def project_to_class(W, spec: MatrixClassSpec) -> np.ndarray:
    """Map W into the class: subspace projection, rank truncation, then radial rescale."""
    W = as_matrix(W)
    if spec.basis_E is not None:
        E = spec.basis_E
        W = E @ (E.T @ W)
    cap = spec.rank_bound
    if numerical_rank(W) > cap:
        U, s, Vt = np.linalg.svd(W, full_matrices=False)
        W = (U[:, :cap] * s[:cap]) @ Vt[:cap]
    norm = class_norm(W, spec)
    if norm > spec.B_w:
        W = W * (spec.B_w / norm)
    return W


def sample_ball(rng: np.random.Generator, shape, radius: float, norm: float) -> np.ndarray:
    """Random points of ℓ_norm at most radius along the last axis."""
    _check_exponent(norm, "norm")
    shape = tuple(shape)
    if math.isinf(norm):
        return radius * rng.uniform(-1.0, 1.0, size=shape)
    points = rng.standard_normal(shape)
    lengths = np.linalg.norm(points, ord=norm, axis=-1, keepdims=True)
    radii = radius * rng.uniform(size=shape[:-1] + (1,))
    return points * radii / np.maximum(lengths, 1e-300)
