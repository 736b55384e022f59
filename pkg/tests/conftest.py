import numpy as np
import pytest

from volres import kernels, resolvent


@pytest.fixture(scope="session")
def exp_resolvent():
    pk = kernels.discretize(kernels.Exponential(k=0.5, theta=1.0), 0.05, 5.0)
    return resolvent.build(pk, 5.0, 1e-10)


@pytest.fixture(scope="session")
def const_resolvent():
    pk = kernels.discretize(kernels.ConstantUnit(k=0.5), 1.0, 5.0)
    return resolvent.build(pk, 5.0, 1e-12)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
