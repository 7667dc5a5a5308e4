import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "pcvi",
    deadline=None,
    derandomize=True,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pcvi")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
