import pytest
from hypothesis import HealthCheck, settings

from greenlink.config import load_config

settings.register_profile(
    "default",
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def base_cfg():
    return load_config("default", env={})


@pytest.fixture(scope="session")
def scenario(base_cfg):
    return base_cfg.scenario


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
