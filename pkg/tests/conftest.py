import pytest

from routewalk.netsim import SimParams
from routewalk.routespace import enumerate_routes
from routewalk.topology import build_cycle, parse_topology

PATH3_TEXT = """\
nodes 3
link 0 1 1000000.0 0.01
link 1 2 1000000.0 0.01
"""

PAIR_TEXT = """\
nodes 2
link 0 1 1000000.0 0.01
"""


@pytest.fixture(scope="session")
def ring6():
    return build_cycle(6)


@pytest.fixture(scope="session")
def ring6_table(ring6):
    return enumerate_routes(ring6)


@pytest.fixture(scope="session")
def ring3():
    return build_cycle(3)


@pytest.fixture(scope="session")
def ring3_table(ring3):
    return enumerate_routes(ring3)


@pytest.fixture(scope="session")
def path3():
    """Line topology 0 - 1 - 2: exactly one route per pair."""
    return parse_topology(PATH3_TEXT)


@pytest.fixture(scope="session")
def path3_table(path3):
    return enumerate_routes(path3)


@pytest.fixture(scope="session")
def pair2():
    """Two nodes joined by one physical link."""
    return parse_topology(PAIR_TEXT)


@pytest.fixture(scope="session")
def pair2_table(pair2):
    return enumerate_routes(pair2)


@pytest.fixture
def quick_sim():
    return SimParams(duration_s=2.0, warmup_s=0.5)
