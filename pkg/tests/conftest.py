import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qwiretap.channels import CQChannel
from qwiretap.hermitian import random_density

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_channel(rng, d=3, n=3, rank=None):
    return CQChannel(np.stack([random_density(d, rng, rank) for _ in range(n)]))
