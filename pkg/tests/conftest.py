import numpy as np
import pytest

from thermobeam.model import InitialData, ModelParams, Variant


def canonical_params(variant=Variant.ROTATION_DAMPED, mu=1.0) -> ModelParams:
    """The coefficient set both built-in presets share."""
    return ModelParams(
        rho1=1.0, rho2=1.0, kappa=365.0, alpha=1.0,
        xi1=1.0, xi2=4.0e-4,
        c_cap=1.0, d_cap=0.002, r_cap=4.0e-4,
        k_theta=1.0, h_diff=0.03,
        mu=0.0 if variant is Variant.UNDAMPED else mu,
        variant=variant, length=1.0,
    )


def mild_params(variant=Variant.UNDAMPED, mu=0.5) -> ModelParams:
    """An O(1) coefficient set for quick structural tests."""
    return ModelParams(
        rho1=1.0, rho2=2.0, kappa=3.0, alpha=1.5,
        xi1=0.7, xi2=0.4,
        c_cap=1.2, d_cap=0.3, r_cap=0.9,
        k_theta=0.8, h_diff=0.6,
        mu=0.0 if variant is Variant.UNDAMPED else mu,
        variant=variant, length=1.0,
    )


def cubic_initial() -> InitialData:
    return InitialData.cubic_bump()


def random_state_vectors(m: int, rng: np.random.Generator):
    """Seven random interior vectors in BeamState field order."""
    return [rng.standard_normal(m) for _ in range(7)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
