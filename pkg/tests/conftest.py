import numpy as np
import pytest

from dihedral_monodromy.curve import preset_passing
from dihedral_monodromy.reps import CharOrbit


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture(scope="session")
def irr_config():
    return preset_passing(6, 3, "irr")


@pytest.fixture(scope="session")
def span_config():
    return preset_passing(6, 3, "span")


@pytest.fixture(scope="session")
def u10():
    return CharOrbit.of(3, 1, 0)


@pytest.fixture(scope="session")
def u01():
    return CharOrbit.of(3, 0, 1)
