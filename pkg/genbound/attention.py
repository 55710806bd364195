"""Scalar-output single-layer attention heads.

A head maps X ∈ ℝ^{T×d} to wᵀ W_cᵀ σ(W_vᵀ Xᵀ softmax(X W_QKᵀ x_cls)).
"""
from typing import List, Optional, Sequence
import logging
import math

import numpy as np
from scipy.special import softmax

from genbound.exceptions import InvalidParameterError, PreconditionError
from genbound.linalg import (
    as_matrix, as_vector, check_class_member, conjugate_exponent, entrywise_norm,
    project_to_class, sample_class_member, vec_norm,
)
from genbound.schemas.attention import (
    POSITIVELY_HOMOGENEOUS, Activation, ConstraintSet, HeadParams, SequenceBatch,
    activation_lipschitz,
)

logger = logging.getLogger(__name__)


def row_softmax(M) -> np.ndarray:
    """Softmax of each row, shifted by the row max."""
    return softmax(as_matrix(M), axis=1)


def activate(u: np.ndarray, activation: Activation, slope: float = 0.01) -> np.ndarray:
    if activation == Activation.RELU:
        return np.maximum(u, 0.0)
    if activation == Activation.LEAKY_RELU:
        return np.where(u > 0, u, slope * u)
    if activation == Activation.TANH:
        return np.tanh(u)
    return u


def transposed_1inf(A: np.ndarray) -> float:
    """‖Aᵀ‖_{1,∞}: max absolute row sum of Aᵀ, the ∞→∞ gain of x ↦ Aᵀx."""
    return entrywise_norm(A, 1, math.inf)


def batch_outputs(W_QK, W_v, W_c, w, x_cls, samples: np.ndarray,
                  activation: Activation = Activation.RELU, slope: float = 0.01) -> np.ndarray:
    """Head outputs for every sample of an n×T×d batch."""
    logits = samples @ (W_QK.T @ x_cls)  # n×T
    attention = softmax(logits, axis=1)
    pooled = np.einsum("nt,ntd->nd", attention, samples)
    hidden = activate(pooled @ W_v, activation, slope)  # rows are W_vᵀ Xᵀ s
    return hidden @ (W_c @ w)


def _check_input(p: HeadParams, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape[1] != p.d:
        raise InvalidParameterError(f"X has {X.shape[1]} columns, head expects d = {p.d}")
    return X


def head_forward(p: HeadParams, X) -> float:
    X = _check_input(p, X)
    out = batch_outputs(p.W_QK, p.W_v, p.W_c, p.w, p.x_cls, X[None, :, :], p.activation, p.slope)
    return float(out[0])


def multihead_forward(heads: Sequence[HeadParams], X) -> float:
    """Sum of head outputs (compensated summation)."""
    if not heads:
        raise InvalidParameterError("need at least one head")
    if len({(h.d, h.k) for h in heads}) > 1:
        raise InvalidParameterError("heads disagree on (d, k)")
    return math.fsum(head_forward(h, X) for h in heads)


def project_constraints(p: HeadParams, c: ConstraintSet) -> HeadParams:
    """Radially rescale each violated parameter onto its ball; W_QK via its class."""
    w, W_c, W_v = p.w, p.W_c, p.W_v
    if vec_norm(w, 1) > c.B_w:
        w = w * (c.B_w / vec_norm(w, 1))
    if transposed_1inf(W_c) > c.B_Wc:
        W_c = W_c * (c.B_Wc / transposed_1inf(W_c))
    if transposed_1inf(W_v) > c.B_Wv:
        W_v = W_v * (c.B_Wv / transposed_1inf(W_v))
    W_QK = project_to_class(p.W_QK.T, c.qk_constraint).T
    return HeadParams(W_QK=W_QK, W_v=W_v, W_c=W_c, w=w, x_cls=p.x_cls,
                      activation=p.activation, slope=p.slope)


def is_feasible(p: HeadParams, c: ConstraintSet, rtol: float = 1e-9) -> bool:
    def ok(value, bound):
        return value <= bound * (1 + rtol) + 1e-12

    return (
        ok(vec_norm(p.w, 1), c.B_w)
        and ok(transposed_1inf(p.W_c), c.B_Wc)
        and ok(transposed_1inf(p.W_v), c.B_Wv)
        and not check_class_member(p.W_QK.T, c.qk_constraint)
        and ok(vec_norm(p.x_cls, c.input_norm), c.B_x)
    )


def attention_lipschitz_check(W1, W2, X, x_cls, B_x: float, input_norm: float = 2.0) -> bool:
    """Whether |e_jᵀXᵀ(softmax(X W1ᵀ x_cls) − softmax(X W2ᵀ x_cls))| ≤ 2B_x²‖(W1 − W2)ᵀx_cls‖_*.

    ‖·‖_* is the dual of the row norm, so the right side is the ℓ₂ form for ℓ₂ rows.
    """
    X, x_cls = as_matrix(X), as_vector(x_cls)
    W1, W2 = as_matrix(W1), as_matrix(W2)
    row_norms = np.linalg.norm(X, ord=input_norm, axis=1)
    if row_norms.max() > B_x * (1 + 1e-9) + 1e-12:
        raise PreconditionError(f"a row of X has norm {row_norms.max():.6g} > B_x = {B_x}")

    v1, v2 = W1.T @ x_cls, W2.T @ x_cls
    s1 = softmax(X @ v1)
    s2 = softmax(X @ v2)
    lhs = np.abs(X.T @ (s1 - s2))
    rhs = 2 * B_x**2 * vec_norm(v1 - v2, conjugate_exponent(input_norm))
    return bool(np.all(lhs <= rhs * (1 + 1e-9) + 1e-12))


class HeadClass:
    """The feasible H-head class as a flat parameter vector.

    w, W_c and (for positively homogeneous σ) W_v live in unit balls; the outputs are
    multiplied by the factored-out product of their bounds. Optimizer trajectories in
    this parametrization do not depend on those bounds.
    """

    def __init__(self, constraints: ConstraintSet, k: int, heads: int = 1,
                 activation: Activation = Activation.RELU, slope: float = 0.01,
                 x_cls: Optional[np.ndarray] = None):
        if heads < 1 or k < 1:
            raise InvalidParameterError("heads and k must be >= 1")
        self.constraints = constraints
        self.d = constraints.d
        self.k = k
        self.heads = heads
        self.activation = activation
        self.slope = slope
        if x_cls is None:
            x_cls = np.zeros(self.d)
            x_cls[0] = constraints.B_x
        self.x_cls = as_vector(x_cls)

        self.homogeneous = activation in POSITIVELY_HOMOGENEOUS
        self.v_radius = 1.0 if self.homogeneous else constraints.B_Wv
        self.scale = constraints.B_w * constraints.B_Wc * (constraints.B_Wv if self.homogeneous else 1.0)

        d = self.d
        self._shapes = [("W_QK", (d, d)), ("W_v", (d, k)), ("W_c", (k, d)), ("w", (d,))]
        self._head_size = sum(int(np.prod(shape)) for _, shape in self._shapes)

    @property
    def dim(self) -> int:
        return self.heads * self._head_size

    @property
    def lipschitz(self) -> float:
        return activation_lipschitz(self.activation, self.slope)

    @property
    def output_bound(self) -> float:
        """sup |f| over the class on rows with ‖x‖ ≤ B_x."""
        c = self.constraints
        return self.heads * c.prefactor(self.lipschitz) * c.B_x

    def unpack(self, theta: np.ndarray) -> List[dict]:
        out, offset = [], 0
        for _ in range(self.heads):
            block = {}
            for name, shape in self._shapes:
                size = int(np.prod(shape))
                block[name] = theta[offset:offset + size].reshape(shape)
                offset += size
            out.append(block)
        return out

    def _pack_blocks(self, blocks: List[dict]) -> np.ndarray:
        return np.concatenate([np.ravel(b[name]) for b in blocks for name, _ in self._shapes])

    def project(self, theta: np.ndarray) -> np.ndarray:
        blocks = self.unpack(np.array(theta, dtype=float))
        for b in blocks:
            for name, radius in (("w", 1.0), ("W_c", 1.0), ("W_v", self.v_radius)):
                size = vec_norm(b[name], 1) if name == "w" else transposed_1inf(b[name])
                if size > radius:
                    b[name] = b[name] * (radius / size)
            b["W_QK"] = project_to_class(b["W_QK"].T, self.constraints.qk_constraint).T
        return self._pack_blocks(blocks)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Random feasible point with every parameter on its ball's boundary."""
        blocks = []
        for _ in range(self.heads):
            seed = int(rng.integers(0, 2**63 - 1))
            block = {
                "W_QK": sample_class_member(self.constraints.qk_constraint, seed).T,
                "W_v": rng.standard_normal((self.d, self.k)),
                "W_c": rng.standard_normal((self.k, self.d)),
                "w": rng.standard_normal(self.d),
            }
            block["w"] /= max(vec_norm(block["w"], 1), 1e-300)
            block["W_c"] /= max(transposed_1inf(block["W_c"]), 1e-300)
            block["W_v"] *= self.v_radius / max(transposed_1inf(block["W_v"]), 1e-300)
            blocks.append(block)
        return self._pack_blocks(blocks)

    def unit_outputs(self, theta: np.ndarray, samples: np.ndarray) -> np.ndarray:
        """Outputs with the factored-out scale left off."""
        total = np.zeros(samples.shape[0])
        for b in self.unpack(theta):
            total += batch_outputs(b["W_QK"], b["W_v"], b["W_c"], b["w"], self.x_cls, samples,
                                   self.activation, self.slope)
        return total

    def outputs(self, theta: np.ndarray, samples: np.ndarray) -> np.ndarray:
        if self.scale == 0.0:
            return np.zeros(samples.shape[0])
        return self.scale * self.unit_outputs(theta, samples)

    def check_batch(self, batch: SequenceBatch) -> None:
        c = self.constraints
        if batch.d != self.d:
            raise PreconditionError(f"batch has d = {batch.d}, class expects {self.d}")
        if batch.samples.size:
            norms = np.linalg.norm(batch.samples, ord=c.input_norm, axis=2)
            if norms.max() > c.B_x * (1 + 1e-9) + 1e-12:
                raise PreconditionError(
                    f"a sequence row has ℓ_{c.input_norm} norm {norms.max():.6g} > B_x = {c.B_x}"
                )

    def to_heads(self, theta: np.ndarray) -> List[HeadParams]:
        """Heads with the bounds multiplied back in."""
        c = self.constraints
        v_scale = c.B_Wv if self.homogeneous else 1.0
        return [
            HeadParams(W_QK=b["W_QK"], W_v=b["W_v"] * v_scale, W_c=b["W_c"] * c.B_Wc,
                       w=b["w"] * c.B_w, x_cls=self.x_cls, activation=self.activation,
                       slope=self.slope)
            for b in self.unpack(theta)
        ]

    def from_heads(self, heads: Sequence[HeadParams]) -> np.ndarray:
        if len(heads) != self.heads:
            raise InvalidParameterError(f"expected {self.heads} heads, got {len(heads)}")
        c = self.constraints
        v_scale = c.B_Wv if self.homogeneous else 1.0

        def unscale(a, s):
            return a / s if s > 0 else np.zeros_like(a)

        blocks = [
            {"W_QK": h.W_QK, "W_v": unscale(h.W_v, v_scale), "W_c": unscale(h.W_c, c.B_Wc),
             "w": unscale(h.w, c.B_w)}
            for h in heads
        ]
        return self._pack_blocks(blocks)
