"""Monte Carlo Rademacher complexity of attention heads against the corollary bounds."""
from typing import Dict, List
import logging

import numpy as np

from genbound.attention import HeadClass, attention_lipschitz_check
from genbound.complexity import corollary_bound, mc_rademacher
from genbound.exceptions import InvalidParameterError
from genbound.experiments.builders import constraint_set, sequence_batch
from genbound.linalg import sample_ball
from genbound.schemas.attention import Activation
from genbound.schemas.experiment import GridValue, ResultRow

logger = logging.getLogger(__name__)

NAME = "rademacher_verify"

DEFAULTS: Dict[str, List[GridValue]] = {
    "mode": ["dominance"],
    "corollary": ["cor_main1", "cor_main2", "cor_18"],
    "heads": [1],
    "activation": ["relu"],
    "T": [4],
    "d": [3],
    "k": [2],
    "r_w": [2],
    "n": [16],
    "B_x": [1.0],
    "B_QK": [1.0],
    "B_w": [1.0],
    "B_Wc": [1.0],
    "B_Wv": [1.0],
    "sigma_draws": [64],
    "restarts": [20],
    "steps": [30],
    "pairs": [1000],
    "input_norm": [2.0],
}


def _dominance(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    rng = np.random.default_rng(seed)
    c_set = constraint_set(params, rng)
    heads = int(params["heads"])
    activation = Activation(str(params["activation"]))
    head_class = HeadClass(c_set, k=int(params["k"]), heads=heads, activation=activation)
    batch = sequence_batch(c_set, int(params["n"]), int(params["T"]), rng)

    estimate = mc_rademacher(head_class, batch, int(params["sigma_draws"]),
                             restarts=int(params["restarts"]), seed=seed, steps=int(params["steps"]))
    bound = corollary_bound(c_set, batch.n, head_class.lipschitz, heads)
    logger.info("%s H=%d: estimate %.4g (se %.2g) vs bound %.4g", c_set.corollary.value, heads,
                estimate.value, estimate.std_error, bound)
    return [ResultRow.compare(NAME, {}, estimate.value, bound)]


def _lipschitz(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    """Softmax-pooling perturbation inequality on random pairs of W_QK."""
    rng = np.random.default_rng(seed)
    d, T = int(params["d"]), int(params["T"])
    B_x, input_norm = float(params["B_x"]), float(params["input_norm"])
    failures = 0
    for _ in range(int(params["pairs"])):
        scale = rng.uniform(0.1, 5.0)
        W1 = scale * rng.standard_normal((d, d))
        W2 = W1 + rng.uniform(0.0, 1.0) * rng.standard_normal((d, d))
        X = sample_ball(rng, (T, d), B_x, input_norm)
        x_cls = sample_ball(rng, (d,), B_x, input_norm)
        failures += not attention_lipschitz_check(W1, W2, X, x_cls, B_x, input_norm)
    return [ResultRow.compare(NAME, {"check": "softmax_lipschitz"}, failures, 0)]


def evaluate(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    mode = str(params["mode"])
    if mode == "dominance":
        return _dominance(params, seed)
    if mode == "lipschitz":
        return _lipschitz(params, seed)
    raise InvalidParameterError(f"unknown rademacher_verify mode {mode!r}")
