import math

import pytest
from hypothesis import assume, given, strategies as st

from genbound import bounds
from genbound.bounds import (
    best_bound, bound_appF, bound_for_spec, bound_multihead, bound_thm1, bound_thm2, bound_thm3,
    bound_thm4, clamped_log, lemma_aux2_check, lemma_aux_check,
)
from genbound.exceptions import DomainError, InvalidParameterError
from genbound.schemas.bound import BoundQuery, Regime, TheoremId
from genbound.schemas.matrix import MatrixClassSpec, NormKind
from tests.oracle_table import CLOSED_FORM

positive = st.floats(min_value=0.05, max_value=20, allow_nan=False)


class TestClosedForms:
    @pytest.mark.parametrize("name, fields, expected", CLOSED_FORM)
    def test_golden_values(self, name, fields, expected):
        result = getattr(bounds, name)(BoundQuery(**fields))
        assert result.log_cover == pytest.approx(expected, rel=1e-12)

    def test_clamped_at_zero(self):
        q = BoundQuery(B_x=1, B_w=1, r_w=1, eps=10)
        assert bound_thm1(q).log_cover == 0.0
        assert clamped_log(0.5) == 0.0

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            BoundQuery(B_x=1, B_w=1, r_w=1, eps=0)

    def test_missing_dimensions(self):
        with pytest.raises(InvalidParameterError):
            bounds.bound_cor_mind_k(BoundQuery(B_x=1, B_w=1, r_w=1, eps=1, d=3))

    @given(positive, positive, st.integers(1, 50), positive)
    def test_monotone_in_eps(self, B_x, B_w, r_w, eps):
        small = BoundQuery(B_x=B_x, B_w=B_w, r_w=r_w, eps=eps)
        large = BoundQuery(B_x=B_x, B_w=B_w, r_w=r_w, eps=2 * eps)
        for fn in (bound_thm1, bound_thm2, bound_thm4):
            assert fn(large).log_cover <= fn(small).log_cover

    @given(positive, st.integers(1, 50), positive)
    def test_depends_on_product_only(self, B_x, r_w, eps):
        a = BoundQuery(B_x=B_x, B_w=2.0, r_w=r_w, eps=eps)
        b = BoundQuery(B_x=2 * B_x, B_w=1.0, r_w=r_w, eps=eps)
        assert bound_thm2(a).log_cover == pytest.approx(bound_thm2(b).log_cover)

    @given(positive, positive, st.integers(1, 50), positive)
    def test_monotone_in_radii_and_rank(self, B_x, B_w, r_w, eps):
        base = BoundQuery(B_x=B_x, B_w=B_w, r_w=r_w, eps=eps)
        grown = [base.model_copy(update={"B_x": 2 * B_x}), base.model_copy(update={"B_w": 2 * B_w}),
                 base.model_copy(update={"r_w": r_w + 1})]
        for fn in (bound_thm1, bound_thm2, bound_thm3, bound_thm4, bound_appF):
            for q in grown:
                assert fn(q).log_cover >= fn(base).log_cover

    @given(positive, positive, st.integers(1, 50), positive, st.floats(min_value=0.1, max_value=10))
    def test_scaling_inputs_and_radius_together(self, B_x, B_w, r_w, eps, lam):
        q = BoundQuery(B_x=B_x, B_w=B_w, r_w=r_w, eps=eps, d=3, k=4)
        scaled = q.model_copy(update={"B_x": lam * B_x, "eps": lam * eps})
        for name, _, _ in CLOSED_FORM:
            fn = getattr(bounds, name)
            assert fn(scaled).log_cover == pytest.approx(fn(q).log_cover, rel=1e-9, abs=1e-12)

    def test_rank_one_frobenius_equals_basis(self):
        q = BoundQuery(B_x=1, B_w=1, r_w=1, eps=0.3)
        assert bound_thm2(q).log_cover == pytest.approx(bound_thm4(q).log_cover)


class TestBestBound:
    def test_ties_go_to_volumetric(self):
        q = BoundQuery(B_x=0, B_w=1, r_w=1, eps=1)
        volumetric, maurey = bound_thm1(q), bound_thm2(q)
        assert volumetric.log_cover == maurey.log_cover == 0.0
        assert best_bound(q, volumetric, maurey).regime == Regime.VOLUMETRIC

    def test_small_eps_prefers_volumetric(self):
        q = BoundQuery(B_x=1, B_w=1, r_w=2, eps=0.01)
        assert best_bound(q, bound_thm1(q), bound_thm2(q)).theorem_id == TheoremId.T1_VOLUMETRIC

    def test_regimes_must_differ(self):
        q = BoundQuery(B_x=1, B_w=1, r_w=2, eps=0.5)
        with pytest.raises(InvalidParameterError):
            best_bound(q, bound_thm2(q), bound_thm1(q))

    def test_for_spec_picks_theorem_by_kind(self):
        spec = MatrixClassSpec(d=3, k=3, norm_kind=NormKind.TRANSPOSED_21, B_w=1.0, rank_cap=2)
        assert bound_for_spec(spec, 1.0).theorem_id in (TheoremId.L_MAIN0_APPF, TheoremId.T3_21_RANK)
        spectral = MatrixClassSpec(d=3, k=3, norm_kind=NormKind.SPECTRAL, B_w=1.0)
        assert bound_for_spec(spectral, 0.5).theorem_id == TheoremId.T1_VOLUMETRIC

    def test_rank_cap_tightens_frobenius_maurey(self):
        spec = MatrixClassSpec(d=4, k=4, norm_kind=NormKind.FROBENIUS, B_w=1.0, rank_cap=1, B_x=1.0)
        result = bound_for_spec(spec, 1.0)
        assert result.theorem_id == TheoremId.T2_FROB_RANK
        assert result.log_cover == pytest.approx(math.log(3))

    def test_multihead_scales_linearly(self):
        assert bound_multihead(1.5, 4) == 6.0
        with pytest.raises(InvalidParameterError):
            bound_multihead(1.0, 0)


class TestAuxiliaryInequalities:
    @given(st.floats(min_value=(math.e - 1) / 2, max_value=1e3), st.floats(min_value=1, max_value=1e3))
    def test_holds_for_y_at_least_c(self, c, ratio):
        assert lemma_aux_check(c, c * ratio)

    def test_fails_near_half_c_for_large_c(self):
        assert not lemma_aux_check(5.0, 2.5)

    def test_domain(self):
        with pytest.raises(DomainError):
            lemma_aux_check(0.5, 1.0)
        with pytest.raises(DomainError):
            lemma_aux_check(1.0, 0.1)

    @given(positive, positive, st.integers(1, 200), st.floats(min_value=1e-3, max_value=1.0))
    def test_volumetric_beats_rank_factor_maurey(self, B_x, B_w, r_w, fraction):
        eps = fraction * B_x * B_w * math.sqrt(2 / r_w)
        assume(eps > 0)
        q = BoundQuery(B_x=B_x, B_w=B_w, r_w=r_w, eps=eps)
        assert bound_thm1(q).log_cover < bound_thm2(q).log_cover

    @given(positive, positive, st.integers(1, 200), st.floats(min_value=1e-3, max_value=1.0))
    def test_volumetric_beats_rank_free_maurey(self, B_x, B_w, r_w, fraction):
        eps = fraction * B_x * B_w / math.sqrt(r_w)
        assume(eps > 0)
        assert lemma_aux2_check(BoundQuery(B_x=B_x, B_w=B_w, r_w=r_w, eps=eps))
