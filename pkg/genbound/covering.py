"""Empirical ε-nets of sampled image sets z = Wx."""
from typing import Sequence
import heapq
import itertools
import logging
import math

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from genbound.config import get_settings
from genbound.exceptions import InvalidParameterError, NumericFailureError, PreconditionError, SizeLimitError
from genbound.linalg import sample_class_member
from genbound.schemas.covering import CoverEstimate, CoverMethod, ImageCloud
from genbound.schemas.matrix import MatrixClassSpec

logger = logging.getLogger(__name__)


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")


def build_cloud(spec: MatrixClassSpec, inputs: Sequence, n_matrices: int, seed: int) -> ImageCloud:
    """Pool z = Wx over n_matrices sampled members and every input."""
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    if X.shape[1] != spec.d:
        raise PreconditionError(f"inputs must have dimension {spec.d}, got {X.shape[1]}")
    norms = np.linalg.norm(X, ord=spec.input_norm, axis=1)
    if norms.size and norms.max() > spec.B_x * (1 + 1e-9) + 1e-12:
        raise PreconditionError(
            f"an input has ℓ_{spec.input_norm} norm {norms.max():.6g} > B_x = {spec.B_x}"
        )

    seeds = np.random.default_rng(seed).integers(0, 2**63 - 1, size=n_matrices)
    images = [X @ sample_class_member(spec, int(s)).T for s in seeds]
    points = np.vstack(images) if images else np.zeros((0, spec.k))

    radius = spec.output_radius
    if points.size and np.linalg.norm(points, axis=1).max() > radius + 1e-9:
        raise NumericFailureError("an image point left the B_w·B_x ball")
    return ImageCloud(points=points, source_spec=spec, n_inputs=X.shape[0], n_matrices=n_matrices)


def greedy_cover(cloud: ImageCloud, eps: float) -> CoverEstimate:
    """Internal cover by greedy max coverage; ties go to the lowest point index."""
    _check_eps(eps)
    points = cloud.points
    m = points.shape[0]
    if m == 0:
        return CoverEstimate(centers=points, eps=eps, size=0, method=CoverMethod.GREEDY_INTERNAL,
                             center_indices=np.zeros(0, dtype=int))

    workers = get_settings().workers
    tree = cKDTree(points)
    gains = tree.query_ball_point(points, eps, return_length=True, workers=workers)
    uncovered = np.ones(m, dtype=bool)
    remaining = m

    # Lazy evaluation: stored gains only ever overestimate
    heap = [(-int(g), i) for i, g in enumerate(gains)]
    heapq.heapify(heap)
    chosen = []
    while remaining:
        _, i = heapq.heappop(heap)
        neighbours = np.asarray(tree.query_ball_point(points[i], eps), dtype=int)
        gain = int(uncovered[neighbours].sum())
        if gain == 0:
            continue
        if heap and (-heap[0][0] > gain or (-heap[0][0] == gain and heap[0][1] < i)):
            heapq.heappush(heap, (-gain, i))
            continue
        chosen.append(i)
        uncovered[neighbours] = False
        remaining -= gain

    idx = np.array(chosen, dtype=int)
    logger.debug("greedy cover of %d points at eps=%g uses %d centers", m, eps, len(idx))
    return CoverEstimate(centers=points[idx], eps=eps, size=len(idx),
                         method=CoverMethod.GREEDY_INTERNAL, center_indices=idx)


def exact_min_cover(cloud: ImageCloud, eps: float) -> CoverEstimate:
    """Minimum internal cover by exhaustive search over center subsets."""
    _check_eps(eps)
    points = cloud.points
    m = points.shape[0]
    limit = get_settings().exact_cover_max_points
    if m > limit:
        raise SizeLimitError(f"exact cover supports at most {limit} points, got {m}")
    if m == 0:
        return CoverEstimate(centers=points, eps=eps, size=0, method=CoverMethod.EXACT_MIN,
                             center_indices=np.zeros(0, dtype=int))

    within = cdist(points, points) <= eps
    masks = [int(sum(1 << j for j in np.flatnonzero(row))) for row in within]
    full = (1 << m) - 1
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(m), size):
            covered = 0
            for i in subset:
                covered |= masks[i]
            if covered == full:
                idx = np.array(subset, dtype=int)
                return CoverEstimate(centers=points[idx], eps=eps, size=size,
                                     method=CoverMethod.EXACT_MIN, center_indices=idx)
    raise NumericFailureError("exhaustive search found no cover")  # all points together always cover


def volumetric_grid_cover(radius: float, dim: int, eps: float) -> CoverEstimate:
    """Cube-center grid with side 2ε/√dim, kept within radius + ε of the origin."""
    _check_eps(eps)
    if radius < 0 or dim < 1:
        raise InvalidParameterError("radius must be >= 0 and dim >= 1")
    step = 2 * eps / math.sqrt(dim)
    per_axis = max(1, math.ceil(2 * radius / step))
    limit = get_settings().grid_max_size
    if per_axis ** dim > limit:
        raise SizeLimitError(f"grid of {per_axis}^{dim} points exceeds {limit}")

    axis = step * (np.arange(per_axis) - (per_axis - 1) / 2)
    grid = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    centers = grid[np.linalg.norm(grid, axis=1) <= radius + eps]
    return CoverEstimate(centers=centers, eps=eps, size=len(centers),
                         method=CoverMethod.VOLUMETRIC_GRID)


def empirical_log_cover(spec: MatrixClassSpec, inputs: Sequence, eps: float,
                        n_matrices: int, seed: int) -> float:
    """ln of the greedy internal cover size of the sampled image cloud."""
    cover = greedy_cover(build_cloud(spec, inputs, n_matrices, seed), eps)
    return math.log(cover.size) if cover.size > 1 else 0.0
