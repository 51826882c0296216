"""Shared fixtures: shipped channel tables and hand-built topologies."""

import sys
from importlib import resources

import pytest

from wbansim.channel import ChannelTable, LinkStats, load_channel_table


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # acceptance tests print one line per criterion; repeat them here so they
    # survive stdout capture on passing tests
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def table_path(name: str) -> str:
    return str(resources.files("wbansim.data") / name)


@pytest.fixture(scope="session")
def synthetic_path() -> str:
    return table_path("synthetic.tbl")


@pytest.fixture(scope="session")
def walk_path() -> str:
    return table_path("synthetic_walk.tbl")


@pytest.fixture(scope="session")
def det_path() -> str:
    return table_path("deterministic_full.tbl")


@pytest.fixture(scope="session")
def synthetic_table(synthetic_path) -> ChannelTable:
    return load_channel_table(synthetic_path)


@pytest.fixture(scope="session")
def walk_table(walk_path) -> ChannelTable:
    return load_channel_table(walk_path)


@pytest.fixture(scope="session")
def det_table(det_path) -> ChannelTable:
    return load_channel_table(det_path)


def make_table(edges: dict, posture: str = "walk", off_mean: float = 100.0,
               std: float = 0.0) -> ChannelTable:
    """Noiseless table with the given pairs decodable and the rest far off."""
    pairs = {}
    for i in range(7):
        for j in range(i + 1, 7):
            mean = edges.get((i, j), off_mean)
            pairs[(i, j)] = LinkStats(mean, std)
    return ChannelTable({posture: pairs})


@pytest.fixture(scope="session")
def line_table() -> ChannelTable:
    # sink 1 at one end of a chain, node 0 hanging off the sink
    chain = {(0, 1): 30.0, (1, 2): 30.0, (2, 3): 30.0, (3, 4): 30.0,
             (4, 5): 30.0, (5, 6): 30.0}
    return make_table(chain)
