"""Empirical covers against the closed-form bounds, the exact oracle and the grid construction."""
from typing import Dict, List
import logging
import math

import numpy as np
from scipy.spatial import cKDTree

from genbound.bounds import bound_for_spec, clamped_log
from genbound.covering import build_cloud, exact_min_cover, greedy_cover, volumetric_grid_cover
from genbound.exceptions import InvalidParameterError
from genbound.experiments.builders import class_spec
from genbound.linalg import sample_ball
from genbound.schemas.covering import ImageCloud
from genbound.schemas.experiment import GridValue, ResultRow

logger = logging.getLogger(__name__)

NAME = "covering_verify"

DEFAULTS: Dict[str, List[GridValue]] = {
    "mode": ["dominance"],
    "norm_kind": ["spectral_2to2", "frobenius", "transposed_21", "basis_p1"],
    "d": [4],
    "k": [4],
    "r_w": [1, 2],
    "eps": [0.1, 0.2, 0.5, 1.0],
    "B_w": [1.0],
    "B_x": [1.0],
    "n_matrices": [200],
    "n_inputs": [50],
    "n_points": [12],
    "instances": [40],
    "queries": [2000],
}


def _dominance(params: Dict[str, GridValue], rng: np.random.Generator) -> List[ResultRow]:
    """ln of the greedy internal cover at ε against the bound at ε/2."""
    d, k, r_w = int(params["d"]), int(params["k"]), int(params["r_w"])
    eps = float(params["eps"])
    spec = class_spec(str(params["norm_kind"]), d, k, min(r_w, k), float(params["B_w"]),
                      float(params["B_x"]), rng)
    inputs = sample_ball(rng, (int(params["n_inputs"]), d), spec.B_x, spec.input_norm)
    cloud = build_cloud(spec, inputs, int(params["n_matrices"]), int(rng.integers(0, 2**63 - 1)))
    cover = greedy_cover(cloud, eps)
    measured = math.log(cover.size) if cover.size > 1 else 0.0
    bound = bound_for_spec(spec, eps / 2)
    return [ResultRow.compare(NAME, {"theorem": bound.theorem_id.value}, measured, bound.log_cover)]


def _oracle(params: Dict[str, GridValue], rng: np.random.Generator) -> List[ResultRow]:
    """Greedy size within [OPT, OPT·(1 + ln N)] on small random clouds."""
    n_points, k = int(params["n_points"]), int(params["k"])
    eps = float(params["eps"])
    worst_ratio, worst_gap = 0.0, -math.inf
    for _ in range(int(params["instances"])):
        cloud = ImageCloud(points=sample_ball(rng, (n_points, k), 1.0, 2.0))
        greedy = greedy_cover(cloud, eps).size
        optimum = exact_min_cover(cloud, eps).size
        worst_ratio = max(worst_ratio, greedy / optimum)
        worst_gap = max(worst_gap, optimum - greedy)
    return [
        ResultRow.compare(NAME, {"check": "greedy_ratio"}, worst_ratio, 1 + math.log(n_points)),
        ResultRow.compare(NAME, {"check": "optimum_below_greedy"}, worst_gap, 0),
    ]


def _grid(params: Dict[str, GridValue], rng: np.random.Generator) -> List[ResultRow]:
    """Grid size against the volumetric bound, and its covering radius on random ball points."""
    radius, dim, eps = float(params["B_w"]) * float(params["B_x"]), int(params["r_w"]), float(params["eps"])
    cover = volumetric_grid_cover(radius, dim, eps)
    volumetric = 0.5 * dim * clamped_log(4 * (radius / eps) ** 2 * dim)
    queries = sample_ball(rng, (int(params["queries"]), dim), radius, 2.0)
    distances, _ = cKDTree(cover.centers).query(queries)
    return [
        ResultRow.compare(NAME, {"check": "grid_size"}, math.log(cover.size), volumetric),
        ResultRow.compare(NAME, {"check": "grid_radius"}, float(distances.max()), eps * (1 + 1e-12)),
    ]


def evaluate(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    mode = str(params["mode"])
    rng = np.random.default_rng(seed)
    if mode == "dominance":
        return _dominance(params, rng)
    if mode == "oracle":
        return _oracle(params, rng)
    if mode == "grid":
        return _grid(params, rng)
    raise InvalidParameterError(f"unknown covering_verify mode {mode!r}")
