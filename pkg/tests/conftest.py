import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Property tests exercising quadrature or sampling are slow per example;
# keep example counts moderate and drop the per-example deadline.
settings.register_profile(
    "pqdslln",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pqdslln")


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
