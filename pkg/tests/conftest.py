import numpy as np
import pytest

from genbound.config import get_settings
from genbound.experiments.builders import orthonormal_basis
from genbound.schemas.attention import ConstraintSet
from genbound.schemas.matrix import MatrixClassSpec, NormKind


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def settings_env(monkeypatch):
    """Set GENBOUND_* variables; the cached settings are rebuilt around the test."""
    get_settings.cache_clear()

    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(f"GENBOUND_{key.upper()}", str(value))
        get_settings.cache_clear()
        return get_settings()

    yield apply
    get_settings.cache_clear()


@pytest.fixture
def frobenius_spec(rng):
    return MatrixClassSpec(d=4, k=5, norm_kind=NormKind.FROBENIUS, B_w=2.0, rank_cap=2,
                           basis_E=orthonormal_basis(rng, 5, 3), B_x=1.5)


def make_constraints(kind: str = "cor_main1", d: int = 3, r_w: int = 2, B_x: float = 1.0,
                     B_QK: float = 1.0, B_w: float = 1.0, B_Wc: float = 1.0, B_Wv: float = 1.0,
                     seed: int = 0) -> ConstraintSet:
    rng = np.random.default_rng(seed)
    if kind == "cor_main1":
        qk = MatrixClassSpec(d=d, k=d, norm_kind=NormKind.BASIS_P1, B_w=B_QK, p=1.0,
                             basis_E=orthonormal_basis(rng, d, r_w), B_x=B_x, input_norm=1.0)
    elif kind == "cor_main2":
        qk = MatrixClassSpec(d=d, k=d, norm_kind=NormKind.ENTRYWISE_PQ, B_w=B_QK, p=1.0, q=1.0,
                             B_x=B_x, input_norm=1.0)
    else:
        qk = MatrixClassSpec(d=d, k=d, norm_kind=NormKind.TRANSPOSED_21, B_w=B_QK,
                             basis_E=orthonormal_basis(rng, d, r_w), rank_cap=r_w, B_x=B_x)
    return ConstraintSet(B_w=B_w, B_Wc=B_Wc, B_Wv=B_Wv, qk_constraint=qk)


@pytest.fixture
def constraints():
    return make_constraints


@pytest.fixture
def tiny_ascent(settings_env):
    """Few restarts and steps so optimizer-backed tests stay fast."""
    return settings_env(restarts=2, ascent_steps=5, train_steps=5, threads=2)
