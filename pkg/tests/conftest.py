import pytest

from bmfx import benchmarks


@pytest.fixture(scope="session")
def rca4():
    return benchmarks.load("rca4")


@pytest.fixture(scope="session")
def rca8():
    return benchmarks.load("rca8")


@pytest.fixture(scope="session")
def rca16():
    return benchmarks.load("rca16")


@pytest.fixture(scope="session")
def rca32():
    return benchmarks.load("rca32")
