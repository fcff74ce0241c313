import pytest

from bagsearch import fixtures


@pytest.fixture
def chain():
    return fixtures.load("chain")


@pytest.fixture
def disease():
    return fixtures.load("disease")


@pytest.fixture
def ranking():
    return fixtures.load("ranking")
