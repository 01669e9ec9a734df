import pytest

from kirchhoffball.constants import BallGeometry, spectral_constants
from kirchhoffball.regimes import ground_state_level
from kirchhoffball.shooting import ProblemParams


@pytest.fixture(scope="session")
def ball3():
    return BallGeometry(3, 1.0)


@pytest.fixture(scope="session")
def consts3(ball3):
    return spectral_constants(ball3)


@pytest.fixture(scope="session")
def lam1(consts3):
    return consts3.lambda1


def make_params(geom, q=2.0, p=4.0, a=1.0, b=1.0, lam=1.0, mu=1.0, **kw):
    return ProblemParams(a=a, b=b, lam=lam, mu=mu, q=q, p=p, geom=geom, **kw)


@pytest.fixture(scope="session")
def params_p4(ball3):
    return make_params(ball3, p=4.0)


@pytest.fixture(scope="session")
def params_p3(ball3):
    return make_params(ball3, p=3.0)


@pytest.fixture(scope="session")
def m0_p4(params_p4):
    return ground_state_level(params_p4)


@pytest.fixture(scope="session")
def m0_p3(params_p3):
    return ground_state_level(params_p3)
