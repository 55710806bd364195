"""Measured generalization gap of trained heads against 2R + 4c√(2ln(4/δ)/n)."""
from typing import Dict, List
import logging

import numpy as np

from genbound.complexity import initial_heads, measure_gap, synthetic_task
from genbound.config import get_settings
from genbound.experiments.builders import constraint_set
from genbound.schemas.attention import Activation
from genbound.schemas.complexity import BoundedLoss, LossKind
from genbound.schemas.experiment import GridValue, ResultRow

logger = logging.getLogger(__name__)

NAME = "gap_study"

DEFAULTS: Dict[str, List[GridValue]] = {
    "corollary": ["cor_main1"],
    "heads": [1],
    "activation": ["relu"],
    "T": [4],
    "d": [3],
    "k": [2],
    "r_w": [2],
    "n": [64],
    "holdout": [10_000],
    "B_x": [1.0],
    "B_QK": [1.0],
    "B_w": [1.0],
    "B_Wc": [1.0],
    "B_Wv": [1.0],
    "loss": ["clipped_squared"],
    "c": [1.0],
    "delta": [0.05],
    "noise": [0.1],
    "steps": [60],
}


def evaluate(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    """The proxy slack (in holdout standard errors) is folded into the theoretical column."""
    rng = np.random.default_rng(seed)
    c_set = constraint_set(params, rng)
    k, heads = int(params["k"]), int(params["heads"])
    activation = Activation(str(params["activation"]))
    task = synthetic_task(c_set, k=k, n=int(params["n"]), holdout_size=int(params["holdout"]),
                          T=int(params["T"]), heads=heads, seed=seed, activation=activation,
                          noise=float(params["noise"]))
    start = initial_heads(c_set, k=k, heads=heads, seed=seed + 1, activation=activation)
    loss = BoundedLoss(kind=LossKind(str(params["loss"])), c=float(params["c"]))

    report = measure_gap(start, c_set, task.train, task.holdout, task.train_labels,
                         task.holdout_labels, loss, delta=float(params["delta"]),
                         steps=int(params["steps"]))
    slack = get_settings().proxy_slack_se * report.holdout_se
    return [
        ResultRow.compare(NAME, {"check": "gap"}, report.gap, report.bound + slack),
        # Report row for the trend in n
        ResultRow.compare(NAME, {"check": "train_loss"}, report.train_loss, report.train_loss),
    ]
