"""Shared fixtures: the three bundled actuator presets."""

import pytest

from exobench.actuator.params import load_spec


@pytest.fixture(scope="session")
def qdd():
    return load_spec("qdd")


@pytest.fixture(scope="session")
def conventional():
    return load_spec("conventional")


@pytest.fixture(scope="session")
def sea():
    return load_spec("sea")


@pytest.fixture(scope="session")
def presets(qdd, conventional, sea):
    return {"qdd": qdd, "conventional": conventional, "sea": sea}
