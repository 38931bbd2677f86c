import pytest

from qhflag.pipeline import Pipeline


@pytest.fixture(scope="session")
def gl2():
    return Pipeline(2)


@pytest.fixture(scope="session")
def gl3():
    return Pipeline(3)


@pytest.fixture(scope="session")
def gl4():
    return Pipeline(4)
