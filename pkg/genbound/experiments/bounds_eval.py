"""Closed-form covering bounds and the two auxiliary inequalities behind them."""
from typing import Dict, List
import logging
import math

import numpy as np

from genbound.bounds import (
    bound_appF, bound_cor_11, bound_cor_mind_k, bound_cor_p1_general, bound_thm1, bound_thm2,
    bound_thm3, bound_thm4, lemma_aux2_check, lemma_aux_check,
)
from genbound.exceptions import InvalidParameterError
from genbound.schemas.bound import BoundQuery
from genbound.schemas.experiment import GridValue, ResultRow

logger = logging.getLogger(__name__)

NAME = "bounds_eval"

DEFAULTS: Dict[str, List[GridValue]] = {
    "mode": ["closed_form"],
    "theorem": ["thm1"],
    "B_x": [1.0],
    "B_w": [1.0],
    "r_w": [1, 2, 4],
    "eps": [0.25, 0.5, 1.0],
    "d": [8],
    "k": [8],
    "points": [10_000],
    "c_max": [50.0],
    "y_ratio_max": [100.0],
}

THEOREMS = {
    "thm1": bound_thm1,
    "thm2": bound_thm2,
    "thm3": bound_thm3,
    "thm4": bound_thm4,
    "appF": bound_appF,
    "cor_mind_k": bound_cor_mind_k,
    "cor_p1_general": bound_cor_p1_general,
    "cor_11": bound_cor_11,
}


def _closed_form(params: Dict[str, GridValue]) -> List[ResultRow]:
    theorem = str(params["theorem"])
    if theorem not in THEOREMS:
        raise InvalidParameterError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    query = BoundQuery(B_x=float(params["B_x"]), B_w=float(params["B_w"]), r_w=int(params["r_w"]),
                       eps=float(params["eps"]), d=int(params["d"]), k=int(params["k"]))
    value = THEOREMS[theorem](query).log_cover
    # Report rows: the value is its own reference
    return [ResultRow.compare(NAME, {}, value, value)]


def _lemma_aux(params: Dict[str, GridValue], rng: np.random.Generator) -> List[ResultRow]:
    """Failures of (c/2)ln(4cy) < y·ln(2c+1) over random c ≥ (e−1)/2, y ≥ c."""
    points = int(params["points"])
    c = rng.uniform((math.e - 1) / 2, float(params["c_max"]), size=points)
    y = c * rng.uniform(1.0, float(params["y_ratio_max"]), size=points)
    failures = sum(not lemma_aux_check(float(ci), float(yi)) for ci, yi in zip(c, y))
    return [ResultRow.compare(NAME, {"check": "aux"}, failures, 0)]


def _lemma_aux2(params: Dict[str, GridValue], rng: np.random.Generator) -> List[ResultRow]:
    """Volumetric versus Maurey forms at random ε ≤ B_x·B_w·√(2/r_w).

    The rank-factor comparison is checked on the whole range; the rank-free form on
    ε ≤ B_x·B_w/√r_w, where it is guaranteed.
    """
    points = int(params["points"])
    B_x, B_w = float(params["B_x"]), float(params["B_w"])
    r_max = int(params["r_w"])
    ranks = rng.integers(1, r_max + 1, size=points)
    fractions = rng.uniform(1e-3, 1.0, size=points)

    rank_factor = rank_free = 0
    for r, f in zip(ranks, fractions):
        r = int(r)
        wide = BoundQuery(B_x=B_x, B_w=B_w, r_w=r, eps=float(f * B_x * B_w * math.sqrt(2 / r)))
        rank_factor += not bound_thm1(wide).log_cover < bound_thm2(wide).log_cover
        narrow = BoundQuery(B_x=B_x, B_w=B_w, r_w=r, eps=float(f * B_x * B_w / math.sqrt(r)))
        rank_free += not lemma_aux2_check(narrow)
    return [
        ResultRow.compare(NAME, {"check": "rank_factor"}, rank_factor, 0),
        ResultRow.compare(NAME, {"check": "rank_free"}, rank_free, 0),
    ]


def evaluate(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    mode = str(params["mode"])
    rng = np.random.default_rng(seed)
    if mode == "closed_form":
        rows = _closed_form(params)
    elif mode == "lemma_aux":
        rows = _lemma_aux(params, rng)
    elif mode == "lemma_aux2":
        rows = _lemma_aux2(params, rng)
    else:
        raise InvalidParameterError(f"unknown bounds_eval mode {mode!r}")
    logger.debug("bounds_eval %s produced %d rows", mode, len(rows))
    return rows
