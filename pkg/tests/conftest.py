import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ggtool",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ggtool")


@pytest.fixture(scope="session")
def catalog():
    from ggtool.verify import builtin_scenarios

    return builtin_scenarios()
