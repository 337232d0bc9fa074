"""Shared test configuration: a deterministic RNG fixture and a hypothesis
profile without deadlines (several properties do dense linear algebra)."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numerics",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numerics")


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
