import numpy as np
import pytest

from cxsect import ComplexDim, ComplexEllipsoid, ComplexLqBall, EuclideanBall, PerturbedBall


@pytest.fixture(scope="session")
def ball2():
    return EuclideanBall(ComplexDim(2), 1.0)


@pytest.fixture(scope="session")
def ball3():
    return EuclideanBall(ComplexDim(3), 1.0)


@pytest.fixture(scope="session")
def ell12():
    return ComplexEllipsoid((1.0, 2.0))


@pytest.fixture(scope="session")
def polydisc2():
    return ComplexLqBall(ComplexDim(2), np.inf)


@pytest.fixture(scope="session")
def pert2():
    return PerturbedBall(ComplexDim(2), 1.0, ((2, 0, 0.06), (4, 1, 0.02)))


def unit_vectors(rng, count, N):
    x = rng.normal(size=(count, N))
    return x / np.linalg.norm(x, axis=1, keepdims=True)
