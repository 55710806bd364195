"""Rademacher complexity: Monte Carlo estimates, chaining bounds and the gap harness.

All complexities are normalized, (1/n)·E_σ sup Σ σ_i f(x_i).
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Protocol, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from genbound.attention import HeadClass, is_feasible
from genbound.bounds import bound_multihead, clamped_log
from genbound.config import get_settings
from genbound.exceptions import InvalidParameterError, PreconditionError
from genbound.linalg import sample_ball
from genbound.schemas.attention import Activation, ConstraintSet, Corollary, HeadParams, SequenceBatch
from genbound.schemas.complexity import (
    BoundedLoss, ChainingParams, DudleySum, GapReport, LossKind, RademacherEstimate, SyntheticTask,
)

logger = logging.getLogger(__name__)

_LN4 = math.log(4.0)


class FunctionClass(Protocol):
    """A parametrized class closed under negation; outputs are `scale`·unit_outputs."""

    scale: float

    def sample(self, rng: np.random.Generator) -> np.ndarray: ...

    def project(self, theta: np.ndarray) -> np.ndarray: ...

    def unit_outputs(self, theta: np.ndarray, samples: np.ndarray) -> np.ndarray: ...

    def check_batch(self, batch: SequenceBatch) -> None: ...


# ---------------------------------------------------------------------------
# Chaining
# ---------------------------------------------------------------------------

def hybrid_log_cover(p: ChainingParams) -> Callable[[float], float]:
    """ε ↦ min{a·ln(b/ε²), q²/ε²} with the logarithm clamped at 0."""

    def log_cover(eps: float) -> float:
        return min(p.a * clamped_log(p.b / eps**2), p.q**2 / eps**2)

    return log_cover


def _check_invariant(p: ChainingParams) -> None:
    if p.eps0 > p.B_x * (1 + 1e-12):
        raise InvalidParameterError(f"eps0 = {p.eps0} exceeds B_x = {p.B_x}")
    worst = p.worst_violation()
    if worst is not None:
        raise InvalidParameterError(f"a·ln(b/ε²) > q²/ε² at ε = {worst:.6g} <= eps0 = {p.eps0}")


def chaining_bound(p: ChainingParams) -> float:
    """Dyadic chaining bound with the volumetric regime below ε₀ and q²/ε² above it.

    (24·prefactor/√n)·(ε₀[√(a·ln(b/B_x²)) + √(a·ln4)(m₀+1)/B_x] + q·ln(B_x/ε₀)).
    """
    _check_invariant(p)
    if p.prefactor == 0:
        return 0.0
    bracket = math.sqrt(p.a * clamped_log(p.b / p.B_x**2)) + math.sqrt(p.a * _LN4) * (p.m0 + 1) / p.B_x
    inner = p.eps0 * bracket + p.q * clamped_log(p.B_x / p.eps0)
    return 24 * p.prefactor / math.sqrt(p.n) * inner


def dudley_generic(cover_log_fn: Callable[[float], float], c_x: float, n: int, m: int,
                   max_depth: int = 64) -> DudleySum:
    """2ε_{m+1} + (12/√n)·Σ_{j≤m} (ε_j − ε_{j+1})·√log N(ε_j) with ε_j = c_x/2^j.

    `best` is the smallest sum over depths 1..max(m, max_depth).
    """
    if m < 1:
        raise InvalidParameterError(f"m must be >= 1, got {m}")
    if not c_x > 0 or n < 1:
        raise InvalidParameterError("c_x must be positive and n >= 1")
    depth = max(m, max_depth)
    eps = c_x / 2.0 ** np.arange(1, depth + 2)
    roots = np.array([math.sqrt(max(0.0, cover_log_fn(float(e)))) for e in eps[:-1]])
    partial = np.cumsum((eps[:-1] - eps[1:]) * roots) * 12 / math.sqrt(n)
    totals = 2 * eps[1:] + partial  # totals[j-1] is the sum at depth j
    best = int(np.argmin(totals))
    return DudleySum(value=float(totals[m - 1]), m=m, best=float(totals[best]), best_m=best + 1)


def chaining_bound_finite(p: ChainingParams, m: int) -> float:
    """The chaining bound at depth m, before letting m grow."""
    _check_invariant(p)
    if p.prefactor == 0:
        return 0.0
    return 2 * p.prefactor * dudley_generic(hybrid_log_cover(p), p.B_x, p.n, m).value


def dudley_integral(cover_log_fn: Callable[[float], float], c_x: float, n: int) -> float:
    """inf over ε of 4ε + (12/√n)·∫_ε^{c_x/2} √log N(u) du."""
    if not c_x > 0 or n < 1:
        raise InvalidParameterError("c_x must be positive and n >= 1")
    upper = c_x / 2

    def objective(eps: float) -> float:
        tail, _ = quad(lambda u: math.sqrt(max(0.0, cover_log_fn(u))), eps, upper, limit=200)
        return 4 * eps + 12 / math.sqrt(n) * tail

    result = minimize_scalar(objective, bounds=(upper * 1e-12, upper), method="bounded",
                             options={"xatol": upper * 1e-9})
    logger.debug("entropy integral minimized at eps=%g", result.x)
    return float(min(result.fun, 4 * upper))


# ---------------------------------------------------------------------------
# Corollary bounds for single-head attention
# ---------------------------------------------------------------------------

def _largest_valid_eps0(a: float, b: float, q: float, eps0: float) -> float:
    """Shrink eps0 until a·ln(b/ε²) ≤ q²/ε² for every ε ≤ eps0.

    With s = 1/ε² the gap φ(s) = q²s − a·ln(bs) is convex with its minimum at s = a/q².
    """
    if a == 0:
        return eps0

    def phi(s: float) -> float:
        return q**2 * s - a * math.log(b * s)

    s_min = a / q**2
    if phi(s_min) >= 0:
        return eps0
    upper = 2 * s_min
    while phi(upper) <= 0:
        upper *= 2
    s_root = brentq(phi, s_min, upper, xtol=1e-14 * upper, rtol=1e-15)
    shrunk = 1 / math.sqrt(s_root * (1 + 1e-9))
    if shrunk < eps0:
        logger.debug("eps0 shrunk from %g to %g", eps0, shrunk)
    return min(eps0, shrunk)


def _check_positive(B_x: float, B_QK: float, r: int, prefactor: float, n: int) -> None:
    if not (B_x > 0 and B_QK > 0):
        raise InvalidParameterError(f"B_x and B_QK must be positive, got {B_x}, {B_QK}")
    if r < 1 or n < 1:
        raise InvalidParameterError(f"rank/dimension and n must be >= 1, got {r}, {n}")
    if not prefactor >= 0:
        raise InvalidParameterError(f"prefactor must be >= 0, got {prefactor}")


def _corollary_params(B_x: float, B_QK: float, r: int, prefactor: float, n: int,
                      rank_in_q: bool) -> ChainingParams:
    _check_positive(B_x, B_QK, r, prefactor, n)
    a = r / 2
    b = 16 * B_x**6 * B_QK**2 * r
    q = 2 * B_x**3 * B_QK * math.sqrt((r if rank_in_q else 1) * math.log(2 * r + 1))
    eps0 = min(B_x, 2 * B_x**3 * B_QK * math.sqrt(2 / r))
    eps0 = _largest_valid_eps0(a, b, q, eps0)
    return ChainingParams(a=a, b=b, q=q, eps0=eps0, B_x=B_x, prefactor=prefactor, n=n)


def cor_main1_params(B_x: float, B_QK: float, r_w: int, prefactor: float, n: int) -> ChainingParams:
    """‖W_QKᵀE‖_{1,1} ≤ B_QK over an r_w-column basis, ℓ₁ inputs."""
    return _corollary_params(B_x, B_QK, r_w, prefactor, n, rank_in_q=False)


def cor_main2_params(B_x: float, B_QK: float, d: int, prefactor: float, n: int) -> ChainingParams:
    return _corollary_params(B_x, B_QK, d, prefactor, n, rank_in_q=False)


def cor_18_params(B_x: float, B_QK: float, r_w: int, prefactor: float, n: int) -> ChainingParams:
    """(2,1) class of rank r_w with ℓ_∞ inputs; q carries an extra √r_w."""
    return _corollary_params(B_x, B_QK, r_w, prefactor, n, rank_in_q=True)


def bound_cor_main1(B_x: float, B_QK: float, r_w: int, prefactor: float, n: int) -> float:
    return chaining_bound(cor_main1_params(B_x, B_QK, r_w, prefactor, n))


def bound_cor_main2(B_x: float, B_QK: float, d: int, prefactor: float, n: int) -> float:
    return chaining_bound(cor_main2_params(B_x, B_QK, d, prefactor, n))


def bound_cor_18(B_x: float, B_QK: float, r_w: int, prefactor: float, n: int) -> float:
    return chaining_bound(cor_18_params(B_x, B_QK, r_w, prefactor, n))


_COROLLARY_BOUNDS = {
    Corollary.MAIN1: bound_cor_main1,
    Corollary.MAIN2: bound_cor_main2,
    Corollary.COR18: bound_cor_18,
}


def corollary_bound(c_set: ConstraintSet, n: int, lipschitz: float = 1.0, heads: int = 1) -> float:
    """Bound for the H-head class under c_set, picked by its W_QK constraint."""
    prefactor = c_set.prefactor(lipschitz)
    if prefactor == 0:
        return 0.0
    single = _COROLLARY_BOUNDS[c_set.corollary](c_set.B_x, c_set.B_QK, c_set.r_w, prefactor, n)
    return bound_multihead(single, heads)


def trauger_expression(B: float, B_x: float, B_QK: float, d: int, n: int) -> float:
    """B·(B_x³α/√n·(1 + ln(√n/(B_x²α))) + B_x·√(ln(2d)/n)), α = B_QK·√(2·ln(2d²+1))."""
    if d < 1 or n < 1:
        raise InvalidParameterError("d and n must be >= 1")
    alpha = B_QK * math.sqrt(2 * math.log(2 * d**2 + 1))
    root_n = math.sqrt(n)
    term1 = 0.0
    if alpha > 0 and B_x > 0:
        term1 = B_x**3 * alpha / root_n * (1 + clamped_log(root_n / (B_x**2 * alpha)))
    term2 = B_x * math.sqrt(math.log(2 * d) / n)
    return B * (term1 + term2)


def gap_bound(rademacher_value: float, c: float, delta: float, n: int) -> float:
    """2R + 4c·√(2·ln(4/δ)/n)."""
    if not 0 < delta < 1:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    if c < 0 or n < 1:
        raise InvalidParameterError("c must be >= 0 and n >= 1")
    return 2 * rademacher_value + 4 * c * math.sqrt(2 * math.log(4 / delta) / n)


# ---------------------------------------------------------------------------
# Monte Carlo Rademacher complexity
# ---------------------------------------------------------------------------

def _signs(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n) * 2.0 - 1.0


def sign_draws(seed: int, sigma_draws: int, n: int) -> np.ndarray:
    """The sigma_draws×n sign matrix mc_rademacher uses for this seed."""
    children = np.random.SeedSequence(seed).spawn(sigma_draws)
    return np.array([_signs(np.random.default_rng(child), n) for child in children])


def _numeric_gradient(f: Callable[[np.ndarray], float], theta: np.ndarray, h: float) -> np.ndarray:
    grad = np.empty_like(theta)
    for i in range(theta.size):
        step = np.zeros_like(theta)
        step[i] = h
        grad[i] = (f(theta + step) - f(theta - step)) / (2 * h)
    return grad


def _ascend(function_class: FunctionClass, samples: np.ndarray, sigma: np.ndarray,
            rng: np.random.Generator, restarts: int, steps: int, lr: float, h: float) -> float:
    """max |(1/n)·σ·f| over the unit class by normalized projected gradient ascent."""
    n = len(sigma)

    def correlation(theta: np.ndarray) -> float:
        return float(sigma @ function_class.unit_outputs(theta, samples)) / n

    best = 0.0
    for _ in range(restarts):
        theta = function_class.project(function_class.sample(rng))
        value = correlation(theta)
        best = max(best, abs(value))
        for _ in range(steps):
            sign = 1.0 if value >= 0 else -1.0
            grad = sign * _numeric_gradient(correlation, theta, h)
            norm = np.linalg.norm(grad)
            if norm == 0.0:
                break
            theta = function_class.project(theta + lr * grad / norm)
            value = correlation(theta)
            best = max(best, abs(value))
    return best


def mc_rademacher(function_class: FunctionClass, batch: SequenceBatch, sigma_draws: int,
                  restarts: Optional[int] = None, seed: int = 0, steps: Optional[int] = None,
                  lr: Optional[float] = None) -> RademacherEstimate:
    """Empirical Rademacher complexity, each sup approximated from below.

    Draws are independent work items with their own spawned seeds, so the result does not
    depend on the thread count.
    """
    settings = get_settings()
    restarts = settings.restarts if restarts is None else restarts
    steps = settings.ascent_steps if steps is None else steps
    lr = settings.ascent_lr if lr is None else lr
    if sigma_draws < 1 or restarts < 1 or steps < 0:
        raise InvalidParameterError("sigma_draws and restarts must be >= 1, steps >= 0")
    function_class.check_batch(batch)

    n = batch.n
    if function_class.scale == 0.0:
        return RademacherEstimate(value=0.0, n=n, sigma_draws=sigma_draws, restarts=restarts,
                                  opt_steps=steps)

    def one_draw(child: np.random.SeedSequence) -> float:
        rng = np.random.default_rng(child)
        sigma = _signs(rng, n)
        return _ascend(function_class, batch.samples, sigma, rng, restarts, steps, lr,
                       settings.fd_step)

    children = np.random.SeedSequence(seed).spawn(sigma_draws)
    with ThreadPoolExecutor(max_workers=settings.workers) as pool:
        maxima = list(pool.map(one_draw, children))

    unit = math.fsum(maxima) / sigma_draws
    spread = float(np.std(maxima, ddof=1)) / math.sqrt(sigma_draws) if sigma_draws > 1 else 0.0
    if unit == 0.0:
        logger.warning("ascent found no correlation above zero in %d draws", sigma_draws)
    scale = function_class.scale
    return RademacherEstimate(value=scale * unit, n=n, sigma_draws=sigma_draws, restarts=restarts,
                              opt_steps=steps, std_error=scale * spread)


# ---------------------------------------------------------------------------
# Generalization gap
# ---------------------------------------------------------------------------

def loss_values(predictions: np.ndarray, labels: np.ndarray, loss: BoundedLoss) -> np.ndarray:
    residual = np.asarray(predictions, dtype=float) - np.asarray(labels, dtype=float)
    if loss.kind == LossKind.CLIPPED_SQUARED:
        return np.minimum(residual**2, loss.c)
    return np.minimum(np.abs(residual), loss.c)


def loss_lipschitz(loss: BoundedLoss) -> float:
    """Lipschitz constant of the loss in the prediction."""
    if loss.kind == LossKind.CLIPPED_SQUARED:
        return 2 * math.sqrt(loss.c)
    return 1.0


def synthetic_task(c_set: ConstraintSet, k: int, n: int, holdout_size: int, T: int = 4,
                   heads: int = 1, seed: int = 0, activation: Activation = Activation.RELU,
                   noise: float = 0.0) -> SyntheticTask:
    """Labels from a feasible planted head on random in-ball sequences, plus optional noise."""
    if n < 1 or holdout_size < 1 or T < 1:
        raise InvalidParameterError("n, holdout_size and T must be >= 1")
    rng = np.random.default_rng(seed)
    head_class = HeadClass(c_set, k=k, heads=heads, activation=activation)
    planted_theta = head_class.sample(rng)

    def labelled(count: int) -> Tuple[SequenceBatch, np.ndarray]:
        samples = sample_ball(rng, (count, T, c_set.d), c_set.B_x, c_set.input_norm)
        labels = head_class.outputs(planted_theta, samples)
        if noise > 0:
            labels = labels + noise * rng.standard_normal(count)
        return SequenceBatch(samples=samples, B_x=c_set.B_x, input_norm=c_set.input_norm), labels

    train, train_labels = labelled(n)
    holdout, holdout_labels = labelled(holdout_size)
    return SyntheticTask(planted=head_class.to_heads(planted_theta), train=train,
                         train_labels=train_labels, holdout=holdout, holdout_labels=holdout_labels)


def initial_heads(c_set: ConstraintSet, k: int, heads: int = 1, seed: int = 0,
                  activation: Activation = Activation.RELU) -> List[HeadParams]:
    """Random feasible starting point for measure_gap."""
    head_class = HeadClass(c_set, k=k, heads=heads, activation=activation)
    return head_class.to_heads(head_class.sample(np.random.default_rng(seed)))


def measure_gap(heads: Sequence[HeadParams], c_set: ConstraintSet, train: SequenceBatch,
                holdout: SequenceBatch, train_labels, holdout_labels, loss: BoundedLoss,
                delta: float = 0.05, steps: Optional[int] = None,
                lr: Optional[float] = None) -> GapReport:
    """Train by projected gradient descent, then compare the held-out gap with 2R + 4c√(2ln(4/δ)/n).

    R is the loss-class complexity: the loss Lipschitz constant times the corollary bound.
    """
    settings = get_settings()
    steps = settings.train_steps if steps is None else steps
    lr = settings.train_lr if lr is None else lr
    if not heads:
        raise InvalidParameterError("need at least one head")
    infeasible = [i for i, h in enumerate(heads) if not is_feasible(h, c_set)]
    if infeasible:
        raise PreconditionError(f"heads {infeasible} violate the constraint set")

    first = heads[0]
    head_class = HeadClass(c_set, k=first.k, heads=len(heads), activation=first.activation,
                           slope=first.slope, x_cls=first.x_cls)
    head_class.check_batch(train)
    head_class.check_batch(holdout)
    y_train = np.asarray(train_labels, dtype=float).ravel()
    y_holdout = np.asarray(holdout_labels, dtype=float).ravel()
    if len(y_train) != train.n or len(y_holdout) != holdout.n:
        raise InvalidParameterError("one label per sequence is required")

    def train_loss(theta: np.ndarray) -> float:
        return float(np.mean(loss_values(head_class.outputs(theta, train.samples), y_train, loss)))

    theta = head_class.from_heads(heads)
    if head_class.scale > 0:
        for _ in range(steps):
            grad = _numeric_gradient(train_loss, theta, settings.fd_step)
            theta = head_class.project(theta - lr * grad)

    fitted = train_loss(theta)
    holdout_losses = loss_values(head_class.outputs(theta, holdout.samples), y_holdout, loss)
    population = float(np.mean(holdout_losses))
    holdout_se = float(np.std(holdout_losses, ddof=1)) / math.sqrt(holdout.n) if holdout.n > 1 else 0.0

    lipschitz = first.lipschitz
    rademacher_bound = loss_lipschitz(loss) * corollary_bound(c_set, train.n, lipschitz, len(heads))
    report = GapReport(
        train_loss=fitted,
        population_loss_estimate=population,
        gap=abs(population - fitted),
        bound=gap_bound(rademacher_bound, loss.c, delta, train.n),
        rademacher_bound=rademacher_bound,
        c=loss.c,
        delta=delta,
        n=train.n,
        holdout_se=holdout_se,
    )
    logger.info("gap %.4g vs bound %.4g (n=%d)", report.gap, report.bound, train.n)
    return report
