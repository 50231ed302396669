import os
import sys

import pytest
from hypothesis import settings

from cssgroups.element import element_from_doc
from cssgroups.space import fixture_text, load_fixture

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FOUR = ("binary", "golden-mean", "qaut", "houghton-H2")

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def binary():
    return load_fixture("binary")


@pytest.fixture(scope="session")
def golden():
    return load_fixture("golden-mean")


@pytest.fixture(scope="session")
def qaut():
    return load_fixture("qaut")


@pytest.fixture(scope="session")
def houghton():
    return load_fixture("houghton-H2")


@pytest.fixture(scope="session")
def s_elem():
    return element_from_doc(fixture_text("s"))


@pytest.fixture(scope="session")
def g0():
    return element_from_doc(fixture_text("g0"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
