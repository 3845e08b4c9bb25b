import numpy as np
import pytest

from dbada.allocation import RateParams
from dbada.campaign import drop_rng
from dbada.scenarios import EnergyModel
from dbada.topology import build_layout, drop_users, link_gains
from dbada.traffic import default_profile, user_counts

ACCEPTANCE_LINES = []


def make_drop(seed, hour, drop=0):
    """Gains for one paired drop of the default configuration."""
    rng = drop_rng(seed, hour, drop)
    layout = build_layout()
    counts = user_counts(default_profile(), hour, rng)
    users = drop_users(layout, counts.n_macro, counts.n_hotspot, rng)
    return link_gains(layout, users)


@pytest.fixture(scope="session")
def params():
    return RateParams()


@pytest.fixture(scope="session")
def energy():
    return EnergyModel()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
