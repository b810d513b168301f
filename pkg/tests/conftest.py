import os

import pytest
from hypothesis import HealthCheck, settings

from ringext.rings import build_ring

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PIR_SPECS = (
    [f"Z({m})" for m in range(2, 17)]
    + [f"GF({q})" for q in (2, 3, 4, 5, 7, 8, 9)]
    + ["ZChain(2,2)", "ZChain(2,3)", "PChain(2,2)", "Mat(2,GF(2))", "Mat(2,GF(3))",
       "Mat(2,ZChain(2,2))", "Prod(Z(4),GF(2))", "Prod(Mat(2,GF(2)),Z(9))"]
)
SMALL_SPECS = ["Z(4)", "Z(6)", "Z(8)", "GF(4)", "PChain(2,2)", "Mat(2,GF(2))", "Prod(Z(4),GF(2))"]
KLEIN = "Table(klein4_group_algebra)"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ring_cache():
    cache = {}

    def get(spec):
        if spec not in cache:
            cache[spec] = build_ring(spec, max_order=300000)
        return cache[spec]

    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
