"""The chaining corollary next to the earlier log n/√n expression."""
from typing import Dict, List
import math

import numpy as np

from genbound.complexity import bound_cor_main2, trauger_expression
from genbound.exceptions import InvalidParameterError
from genbound.experiments.decay_study import log_log_slope
from genbound.schemas.experiment import GridValue, ResultRow

NAME = "compare_trauger"

DEFAULTS: Dict[str, List[GridValue]] = {
    "mode": ["slope", "values"],
    "B": [1.0],
    "B_x": [1.0],
    "B_QK": [1.0],
    "d": [1],
    "n": [100],
    "n_min_exp": [3],
    "n_max_exp": [5],
    "slope_ceiling": [-0.3],
}


def _slope(params: Dict[str, GridValue]) -> List[ResultRow]:
    """Fitted slope of the log n/√n expression lies strictly inside (−1/2, slope_ceiling)."""
    ns = 10 ** np.arange(int(params["n_min_exp"]), int(params["n_max_exp"]) + 1)
    values = np.array([
        trauger_expression(float(params["B"]), float(params["B_x"]), float(params["B_QK"]),
                           int(params["d"]), int(n))
        for n in ns
    ])
    slope = log_log_slope(ns, values)
    # adjacent floats turn measured <= theoretical into the strict comparisons
    ceiling = math.nextafter(float(params["slope_ceiling"]), -math.inf)
    floor = math.nextafter(-0.5, math.inf)
    return [
        ResultRow.compare(NAME, {"check": "slope_ceiling"}, slope, ceiling),
        ResultRow.compare(NAME, {"check": "slope_floor"}, floor, slope),
    ]


def _values(params: Dict[str, GridValue]) -> List[ResultRow]:
    B, B_x, B_QK = float(params["B"]), float(params["B_x"]), float(params["B_QK"])
    d, n = int(params["d"]), int(params["n"])
    ours = bound_cor_main2(B_x, B_QK, d, B, n)
    theirs = trauger_expression(B, B_x, B_QK, d, n)
    # Report rows
    return [
        ResultRow.compare(NAME, {"expression": "cor_main2"}, ours, ours),
        ResultRow.compare(NAME, {"expression": "trauger"}, theirs, theirs),
    ]


def evaluate(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    mode = str(params["mode"])
    if mode == "slope":
        return _slope(params)
    if mode == "values":
        return _values(params)
    raise InvalidParameterError(f"unknown compare_trauger mode {mode!r}")
