import numpy as np
import pytest

from revealib.colored_print import set_color, set_verbosity
from revealib.domain import Domain, Instance, ParameterPoint, ParameterSpace, UtilityForm
from revealib.instances import GenConfig, gen_instance_stream


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale experiments")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale experiment, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def quiet_logs():
    set_verbosity("quiet")
    set_color(False)
    yield
    set_verbosity("normal")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def simplex():
    return ParameterSpace.simplex()


def random_simplex_point(rng, n):
    return ParameterPoint.on_simplex(rng.dirichlet(np.ones(n)))


def quad_knapsack_instance(rng, n, t=1):
    P = rng.uniform(1.0, 21.0, size=n)
    prices = rng.uniform(90.0, 110.0, size=n)
    budget = rng.uniform(1.0, prices.sum())
    return Instance(t, UtilityForm.quad_diag(P / P.sum()), Domain.cont_knapsack(prices, budget))


@pytest.fixture
def small_quad_stream():
    return gen_instance_stream(GenConfig(n=4, m=2, T=20, instance_count=1, seed=7))


@pytest.fixture
def small_polytope_stream():
    return gen_instance_stream(GenConfig(n=3, m=2, T=10, instance_count=1, seed=3, domain="cp"))
