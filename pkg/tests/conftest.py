"""Shared fixtures."""

import pytest

from ipsac.scenario import build_config
from ipsac.schemas import ScenarioConfig


@pytest.fixture()
def default_cfg():
    """Baseline scenario: H = 50 m, D = 400 m, M = 10, T_f = 5 s, tau0 = 0.1 s."""
    return ScenarioConfig()


@pytest.fixture()
def make_cfg():
    """Factory for the baseline scenario with a few fields overridden."""

    def _make(**overrides):
        return build_config(ScenarioConfig().model_dump() | overrides)

    return _make
