import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from scipy.spatial.distance import cdist

from genbound.bounds import bound_for_spec
from genbound.covering import (
    build_cloud, empirical_log_cover, exact_min_cover, greedy_cover, volumetric_grid_cover,
)
from genbound.exceptions import InvalidParameterError, PreconditionError, SizeLimitError
from genbound.linalg import sample_ball
from genbound.schemas.covering import CoverMethod, ImageCloud


def assert_covers(points, cover):
    assert cdist(points, cover.centers).min(axis=1).max() <= cover.eps * (1 + 1e-12)


class TestBuildCloud:
    def test_points_stay_in_output_ball(self, frobenius_spec, rng):
        inputs = sample_ball(rng, (20, 4), 1.5, 2.0)
        cloud = build_cloud(frobenius_spec, inputs, 10, seed=0)
        assert len(cloud) == 200
        assert np.linalg.norm(cloud.points, axis=1).max() <= frobenius_spec.output_radius + 1e-9

    def test_inputs_outside_ball(self, frobenius_spec):
        with pytest.raises(PreconditionError):
            build_cloud(frobenius_spec, np.full((2, 4), 10.0), 3, seed=0)

    def test_input_dimension(self, frobenius_spec):
        with pytest.raises(PreconditionError):
            build_cloud(frobenius_spec, np.zeros((2, 3)), 3, seed=0)


class TestGreedyCover:
    def test_covers_every_point(self, rng):
        points = sample_ball(rng, (300, 3), 1.0, 2.0)
        cover = greedy_cover(ImageCloud(points=points), 0.4)
        assert cover.method == CoverMethod.GREEDY_INTERNAL
        assert cover.size == len(cover.center_indices)
        assert np.array_equal(points[cover.center_indices], cover.centers)
        assert_covers(points, cover)

    def test_empty_cloud(self):
        assert greedy_cover(ImageCloud(points=np.zeros((0, 2))), 1.0).size == 0

    def test_huge_radius_needs_one_center(self, rng):
        cloud = ImageCloud(points=sample_ball(rng, (50, 2), 1.0, 2.0))
        assert greedy_cover(cloud, 5.0).size == 1

    def test_eps_must_be_positive(self, rng):
        with pytest.raises(InvalidParameterError):
            greedy_cover(ImageCloud(points=np.zeros((1, 2))), 0.0)

    @pytest.mark.parametrize("eps, size", [(1.0, 1), (0.5, 3)])
    def test_three_points_on_a_line(self, eps, size):
        cloud = ImageCloud(points=np.array([[0.0], [1.0], [2.0]]))
        assert greedy_cover(cloud, eps).size == size
        assert exact_min_cover(cloud, eps).size == size

    def test_middle_point_covers_the_line(self):
        cover = greedy_cover(ImageCloud(points=np.array([[0.0], [1.0], [2.0]])), 1.0)
        assert cover.center_indices.tolist() == [1]

    def test_size_shrinks_as_eps_grows(self, rng):
        cloud = ImageCloud(points=sample_ball(rng, (300, 2), 1.0, 2.0))
        sizes = [greedy_cover(cloud, eps).size for eps in (0.1, 0.2, 0.4, 0.8, 1.6)]
        assert sizes == sorted(sizes, reverse=True)
        assert sizes[-1] == 1

    @hsettings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(min_value=0.1, max_value=1.5))
    def test_within_log_factor_of_optimum(self, seed, eps):
        rng = np.random.default_rng(seed)
        cloud = ImageCloud(points=sample_ball(rng, (9, 2), 1.0, 2.0))
        greedy = greedy_cover(cloud, eps)
        optimum = exact_min_cover(cloud, eps)
        assert_covers(cloud.points, greedy)
        assert_covers(cloud.points, optimum)
        assert optimum.size <= greedy.size <= optimum.size * (1 + math.log(9))


class TestExactCover:
    def test_size_limit(self, rng):
        with pytest.raises(SizeLimitError):
            exact_min_cover(ImageCloud(points=rng.standard_normal((40, 2))), 0.5)

    def test_two_clusters(self):
        points = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0]])
        assert exact_min_cover(ImageCloud(points=points), 0.2).size == 2


    @hsettings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(min_value=0.05, max_value=1.0))
    def test_minimum_never_grows_with_eps(self, seed, eps):
        cloud = ImageCloud(points=sample_ball(np.random.default_rng(seed), (8, 2), 1.0, 2.0))
        assert exact_min_cover(cloud, 2 * eps).size <= exact_min_cover(cloud, eps).size


class TestVolumetricGrid:
    @pytest.mark.parametrize("dim, eps", [(1, 0.3), (2, 0.5), (3, 0.7)])
    def test_grid_covers_ball(self, rng, dim, eps):
        cover = volumetric_grid_cover(1.0, dim, eps)
        queries = sample_ball(rng, (500, dim), 1.0, 2.0)
        assert_covers(queries, cover)
        volumetric = 0.5 * dim * math.log(4 * dim / eps**2)
        assert math.log(cover.size) <= volumetric

    def test_size_limit(self, settings_env):
        settings_env(grid_max_size=100)
        with pytest.raises(SizeLimitError):
            volumetric_grid_cover(1.0, 3, 0.01)

    def test_bad_arguments(self):
        with pytest.raises(InvalidParameterError):
            volumetric_grid_cover(-1.0, 2, 0.5)


def test_empirical_cover_below_bound(frobenius_spec, rng):
    inputs = sample_ball(rng, (30, 4), 1.5, 2.0)
    measured = empirical_log_cover(frobenius_spec, inputs, 1.0, n_matrices=50, seed=0)
    assert 0.0 <= measured <= bound_for_spec(frobenius_spec, 0.5).log_cover
