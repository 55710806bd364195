"""Convex decompositions of Wx and Maurey sparsification."""
from typing import Optional
import logging
import math

import numpy as np

from genbound.config import get_settings
from genbound.exceptions import InvalidParameterError, NumericFailureError, PreconditionError
from genbound.linalg import as_matrix, as_vector, colspace_basis, entrywise_norm, vec_norm
from genbound.schemas.maurey import ConvexRepresentation, SparseApprox
from genbound.schemas.matrix import conjugate_exponent, exponents_conjugate

logger = logging.getLogger(__name__)

_RTOL = 1e-9


def _within(value: float, bound: float) -> bool:
    return value <= bound * (1 + _RTOL) + 1e-12


def _signed_atoms(basis: np.ndarray, coords: np.ndarray, scale: float,
                  target: np.ndarray) -> ConvexRepresentation:
    """Atoms ±scale·basis_j with weights |coord_j|/scale; sgn(0) = +1."""
    signs = np.where(coords >= 0, 1.0, -1.0)
    atoms = (basis * (signs * scale)).T
    weights = np.abs(coords) / scale if scale > 0 else np.zeros_like(coords)
    return ConvexRepresentation(atoms=atoms, weights=weights, b=scale, target=target)


def _rank_decomposition(W: np.ndarray, x: np.ndarray, B_w: float, B_x: float) -> ConvexRepresentation:
    Q = colspace_basis(W)
    r = Q.shape[1]
    coords = (Q.T @ W) @ x  # W̃x with W̃ = QᵀW
    return _signed_atoms(Q, coords, math.sqrt(r) * B_w * B_x, W @ x)


def decompose_frobenius(W, x, B_w: float, B_x: float) -> ConvexRepresentation:
    """Wx as a convex combination of ±√r·B_w·B_x·Q_j over a basis Q of col(W)."""
    W, x = as_matrix(W), as_vector(x)
    if not _within(float(np.linalg.norm(W)), B_w):
        raise PreconditionError(f"‖W‖_F = {np.linalg.norm(W):.6g} exceeds B_w = {B_w}")
    if not _within(vec_norm(x, 2), B_x):
        raise PreconditionError(f"‖x‖₂ = {vec_norm(x, 2):.6g} exceeds B_x = {B_x}")
    return _rank_decomposition(W, x, B_w, B_x)


def decompose_21(W, x, B_w: float, B_x: float) -> ConvexRepresentation:
    """As decompose_frobenius, for Σ_l ‖W[:, l]‖₂ ≤ B_w and ‖x‖_∞ ≤ B_x."""
    W, x = as_matrix(W), as_vector(x)
    if not _within(entrywise_norm(W, 2, 1), B_w):
        raise PreconditionError(f"‖Wᵀ‖_(2,1) = {entrywise_norm(W, 2, 1):.6g} exceeds B_w = {B_w}")
    if not _within(vec_norm(x, math.inf), B_x):
        raise PreconditionError(f"‖x‖_∞ = {vec_norm(x, math.inf):.6g} exceeds B_x = {B_x}")
    return _rank_decomposition(W, x, B_w, B_x)


def decompose_basis_p1(W, x, E, p: float, B_w: float, B_x: float,
                       q: Optional[float] = None) -> ConvexRepresentation:
    """Wx over the fixed basis E with atoms ±B_w·B_x·E_j (no rank factor)."""
    W, x, E = as_matrix(W), as_vector(x), as_matrix(E)
    if not p >= 1:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    q = conjugate_exponent(p) if q is None else q
    if not exponents_conjugate(p, q):
        raise InvalidParameterError(f"p = {p} and q = {q} are not conjugate")

    if np.linalg.norm(E @ (E.T @ W) - W) > 1e-9 * max(1.0, float(np.linalg.norm(W))):
        raise PreconditionError("col(W) is not contained in span(E)")
    norm = entrywise_norm(W.T @ E, p, 1)
    if not _within(norm, B_w):
        raise PreconditionError(f"‖WᵀE‖_(p,1) = {norm:.6g} exceeds B_w = {B_w}")
    if not _within(vec_norm(x, q), B_x):
        raise PreconditionError(f"‖x‖_q = {vec_norm(x, q):.6g} exceeds B_x = {B_x}")

    coords = E.T @ (W @ x)
    return _signed_atoms(E, coords, B_w * B_x, W @ x)


def theorem_t(rep: ConvexRepresentation, eps: float) -> int:
    """Smallest t with b²/t ≤ ε², which certifies ‖f − approx‖₂ ≤ ε."""
    if not eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    return max(1, math.ceil(rep.b**2 / eps**2))


def sparsify(rep: ConvexRepresentation, t: int, seed: int) -> SparseApprox:
    """Average of t atoms drawn i.i.d. from the weights (leftover mass draws zero)."""
    if t < 1:
        raise InvalidParameterError(f"t must be >= 1, got {t}")
    f = rep.target
    m = len(rep.weights)
    f_sq = float(f @ f)
    bound = max(0.0, (rep.alpha * rep.b**2 - f_sq) / t)

    if m == 0 or not np.any(f):
        return SparseApprox(counts=np.zeros(m, dtype=int), t=t, approx=np.zeros_like(f),
                            sq_error=f_sq, bound=bound)

    probs = np.append(rep.weights, max(0.0, 1.0 - rep.alpha))
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    attempts = max(1, get_settings().sparsify_max_draws // t)
    for attempt in range(1, attempts + 1):
        draws = rng.choice(m + 1, size=t, p=probs)
        counts = np.bincount(draws, minlength=m + 1)[:m]
        approx = counts @ rep.atoms / t
        residual = f - approx
        sq_error = float(residual @ residual)
        if sq_error <= bound + 1e-9:
            if attempt > 1:
                logger.debug("sparsify accepted draw %d at t=%d", attempt, t)
            return SparseApprox(counts=counts, t=t, approx=approx, sq_error=sq_error, bound=bound)
    raise NumericFailureError(f"no draw met the Maurey bound after {attempts * t} samples")


def count_solutions_bound(r: int, t: int) -> float:
    """ln of (2r+1)^t, the bound on #{k ≥ 0 : Σk ≤ t} in r coordinates."""
    if r < 1 or t < 1:
        raise InvalidParameterError("r and t must be >= 1")
    return t * math.log(2 * r + 1)


def count_solutions_exact(r: int, t: int) -> int:
    return math.comb(t + r, r)
