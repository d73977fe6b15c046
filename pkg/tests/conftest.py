import pytest

from hibsim.config import ScenarioConfig


@pytest.fixture
def default_cfg() -> ScenarioConfig:
    return ScenarioConfig()
