import numpy as np
import pytest
from hypothesis import strategies as st

from bmw import core
from bmw.enumerate import Profile, random_presentation

BMW_NAMES = ["bdr", "c2xc2", "gamma33", "gamma45", "gamma66", "jw", "klein", "ratt", "rung", "sv", "wise", "z2"]
GENERIC_NAMES = ["baumslag", "escher", "gamma45plus", "higman"]

SMALL_PROFILES = [
    Profile(0, 1, 0, 1),
    Profile(1, 0, 1, 0),
    Profile(1, 1, 1, 0),
    Profile(0, 2, 1, 0),
    Profile(1, 0, 0, 3),
    Profile(2, 0, 1, 0),
    Profile(1, 1, 1, 1),
    Profile(2, 0, 2, 0),
    Profile(2, 1, 1, 1),
    Profile(0, 3, 2, 0),
    Profile(2, 0, 3, 0),
]


@st.composite
def presentations(draw, profiles=SMALL_PROFILES):
    """Random valid BMW-presentations of small degree."""
    prof = draw(st.sampled_from(profiles))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_presentation(prof, np.random.default_rng(seed))


@pytest.fixture(scope="session")
def cat():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = core.catalog(name)
        return cache[name]

    return get


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
