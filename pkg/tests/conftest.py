from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

# property suites run at least 10^3 randomized cases each
settings.register_profile("suite", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("suite")

@pytest.fixture(scope="session")
def ebch8():
    from shortcodes.codes import build_ebch

    return build_ebch(8, 4)


@pytest.fixture(scope="session")
def rand12():
    from shortcodes.codes import build_random

    return build_random(12, 6, seed=0)


def pytest_terminal_summary(terminalreporter):
    from helpers import acceptance_lines

    lines = acceptance_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
