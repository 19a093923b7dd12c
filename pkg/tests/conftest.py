import pytest
from hypothesis import HealthCheck, settings

from mompda.core import Instance

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def single_task():
    return Instance("single", (0.0, 0.0), ((0.6, 0.8),), (1.0,), (0.05,), 0.065)


@pytest.fixture
def two_task():
    # depot -> task 1 is 1, task 1 -> task 2 is 1
    return Instance("two", (0.0, 0.0), ((1.0, 0.0), (1.0, 1.0)), (2.0, 3.0), (0.0, 1.0), 1.0,
                    allow_zero_rates=True)
