"""
Shared fixtures and the --runslow switch for the long replicate-variance runs.
"""
import numpy as np
import pytest

from mixqmc.config import get_settings
from mixqmc.models import get_model
from mixqmc.schemas.mixture import IntegrandHandle
from mixqmc.services.net_service import default_direction_numbers


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; tests that patch the environment need a clean cache."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def toy():
    return get_model("toy")


@pytest.fixture(scope="session")
def flood():
    return get_model("flood")


@pytest.fixture(scope="session")
def dirs():
    return default_direction_numbers(6)


def constant_integrand(value: float) -> IntegrandHandle:
    return IntegrandHandle(name=f"constant {value}", func=lambda l, x: np.full(x.shape[0], value))


@pytest.fixture
def constant():
    return constant_integrand(2.5)
