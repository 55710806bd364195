"""Maurey sparsification error against (αb² − ‖f‖²)/t on random decompositions."""
from typing import Dict, List
import logging

import numpy as np

from genbound.exceptions import InvalidParameterError
from genbound.experiments.builders import class_spec
from genbound.linalg import conjugate_exponent, sample_ball, sample_class_member
from genbound.maurey import decompose_21, decompose_basis_p1, decompose_frobenius, sparsify
from genbound.schemas.experiment import GridValue, ResultRow

logger = logging.getLogger(__name__)

NAME = "maurey_verify"

DEFAULTS: Dict[str, List[GridValue]] = {
    "decomposition": ["frobenius", "21", "basis_p1"],
    "d": [6],
    "k": [6],
    "r_w": [3],
    "t": [1, 4, 16],
    "B_w": [1.0],
    "B_x": [1.0],
    "p": [2.0],
    "instances": [100],
}

# decomposition → (norm kind of the sampled class, input norm)
_CLASSES = {
    "frobenius": ("frobenius", 2.0),
    "21": ("transposed_21", np.inf),
    "basis_p1": ("basis_p1", None),
}


def evaluate(params: Dict[str, GridValue], seed: int) -> List[ResultRow]:
    decomposition = str(params["decomposition"])
    if decomposition not in _CLASSES:
        raise InvalidParameterError(f"unknown decomposition {decomposition!r}")
    d, k, r_w, t = int(params["d"]), int(params["k"]), int(params["r_w"]), int(params["t"])
    B_w, B_x, p = float(params["B_w"]), float(params["B_x"]), float(params["p"])
    rng = np.random.default_rng(seed)

    kind, input_norm = _CLASSES[decomposition]
    spec = class_spec(kind, d, k, min(r_w, k), B_w, B_x, rng, p=p)
    if input_norm is None:
        input_norm = conjugate_exponent(p)

    rows = []
    for instance in range(int(params["instances"])):
        W = sample_class_member(spec, int(rng.integers(0, 2**63 - 1)))
        x = sample_ball(rng, (d,), B_x, input_norm)
        if decomposition == "frobenius":
            rep = decompose_frobenius(W, x, B_w, B_x)
        elif decomposition == "21":
            rep = decompose_21(W, x, B_w, B_x)
        else:
            rep = decompose_basis_p1(W, x, spec.basis_E, p, B_w, B_x)
        approx = sparsify(rep, t, int(rng.integers(0, 2**63 - 1)))
        rows.append(ResultRow.compare(NAME, {"instance": instance}, approx.sq_error, approx.bound + 1e-9))
    logger.debug("maurey_verify %s: %d instances at t=%d", decomposition, len(rows), t)
    return rows
