"""Rates of the corollary bounds in n and in the rank r_w."""
from typing import Dict, List
import logging

import numpy as np
from scipy.stats import linregress

from genbound.complexity import bound_cor_18, bound_cor_main1, bound_cor_main2
from genbound.exceptions import InvalidParameterError
from genbound.schemas.experiment import GridValue, ResultRow

logger = logging.getLogger(__name__)

NAME = "decay_study"

DEFAULTS: Dict[str, List[GridValue]] = {
    "mode": ["n_slope", "rank_growth"],
    "corollary": ["cor_main2"],
    "B_x": [1.0],
    "B_QK": [1.0],
    "prefactor": [1.0],
    "r_w": [4],
    "n": [100],
    "n_min_exp": [2],
    "n_max_exp": [8],
    "r_min_exp": [4],
    "r_max_exp": [12],
    "slope_tol": [1e-3],
    "residual_tol": [0.05],
}

CURVES = {
    "cor_main1": bound_cor_main1,
    "cor_main2": bound_cor_main2,
    "cor_18": bound_cor_18,
}


def _curve(params: Dict[str, GridValue]):
    name = str(params["corollary"])
    if name not in CURVES:
        raise InvalidParameterError(f"unknown corollary {name!r}")
    return CURVES[name]


def log_log_slope(ns: np.ndarray, values: np.ndarray) -> float:
    return float(linregress(np.log(ns), np.log(values)).slope)


def _n_slope(params: Dict[str, GridValue]) -> List[ResultRow]:
    """|slope + 1/2| of log bound against log n."""
    curve = _curve(params)
    ns = 10 ** np.arange(int(params["n_min_exp"]), int(params["n_max_exp"]) + 1)
    values = np.array([
        curve(float(params["B_x"]), float(params["B_QK"]), int(params["r_w"]),
              float(params["prefactor"]), int(n))
        for n in ns
    ])
    slope = log_log_slope(ns, values)
    logger.info("%s slope in n: %.6f", params["corollary"], slope)
    return [ResultRow.compare(NAME, {"check": "slope_deviation"}, abs(slope + 0.5),
                              float(params["slope_tol"]))]


def _rank_growth(params: Dict[str, GridValue]) -> List[ResultRow]:
    """Relative residual of a c₁ + c₂·ln r_w fit over dyadic r_w."""
    curve = _curve(params)
    ranks = 2 ** np.arange(int(params["r_min_exp"]), int(params["r_max_exp"]) + 1)
    values = np.array([
        curve(float(params["B_x"]), float(params["B_QK"]), int(r), float(params["prefactor"]),
              int(params["n"]))
        for r in ranks
    ])
    fit = linregress(np.log(ranks), values)
    residual = values - (fit.intercept + fit.slope * np.log(ranks))
    relative = float(np.linalg.norm(residual) / np.linalg.norm(values))
    return [ResultRow.compare(NAME, {"check": "log_rank_fit"}, relative, float(params["residual_tol"]))]


def evaluate(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    mode = str(params["mode"])
    if mode == "n_slope":
        return _n_slope(params)
    if mode == "rank_growth":
        return _rank_growth(params)
    raise InvalidParameterError(f"unknown decay_study mode {mode!r}")
