from functools import lru_cache

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from innovgeo.core import ModelParams

settings.register_profile(
    "repo",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@st.composite
def model_params(draw, b=None, phi=None, mu=None):
    return ModelParams(
        sigma=draw(st.floats(1.5, 12.0)),
        lam=draw(st.floats(0.2, 8.0)),
        gamma=draw(st.floats(0.2, 2.0)),
        b=draw(st.floats(0.01, 0.99)) if b is None else b,
        phi=draw(st.floats(0.01, 0.99)) if phi is None else phi,
        mu=draw(st.floats(0.5, 2.0)) if mu is None else mu,
    )


def random_params(rng: np.random.Generator, **fixed) -> ModelParams:
    """One draw from the same box the hypothesis strategy uses."""
    values = dict(
        sigma=rng.uniform(1.5, 12.0),
        lam=rng.uniform(0.2, 8.0),
        gamma=rng.uniform(0.2, 2.0),
        b=rng.uniform(0.01, 0.99),
        phi=rng.uniform(0.01, 0.99),
        mu=rng.uniform(0.5, 2.0),
    )
    values.update(fixed)
    return ModelParams(**values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


REFERENCE = ModelParams(sigma=5, lam=2, gamma=1, b=0.342, phi=0.3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for key in sorted(REPORT, key=lambda k: int(k)):
            terminalreporter.write_line(REPORT[key])


@lru_cache(maxsize=None)
def fixture_sweep(name: str, n_grid: int = 400):
    """Cached phi sweep of a shipped fixture; sweeps take a fraction of a second each."""
    from innovgeo.bifurcation import sweep
    from innovgeo.fixtures import fixture

    fx = fixture(name)
    return sweep(fx.spec, fx.params, "phi", n_grid=n_grid)
