import pytest

from noetherkit import corpus


@pytest.fixture(scope="session")
def fp():
    return corpus.load("freeparticle")


@pytest.fixture(scope="session")
def kepler():
    return corpus.load("kepler3d")


@pytest.fixture(scope="session")
def iso():
    return corpus.load("isochrony", G="x", c=0.0)


@pytest.fixture(scope="session")
def iso_steep():
    return corpus.load("isochrony", G="1/x^3", c=0.0)
