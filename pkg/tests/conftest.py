import pytest

from biconservative.closure import solve_pair
from biconservative.curve import build_profile_curve
from biconservative.spaceform import SpaceForm
from biconservative.surface import build_mesh, curvature_diagnostics

ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def sphere():
    return SpaceForm(1.0)


@pytest.fixture(scope="session")
def sol32(sphere):
    return solve_pair(sphere, (3, 2))


@pytest.fixture(scope="session")
def sol53(sphere):
    return solve_pair(sphere, (5, 3))


@pytest.fixture(scope="session")
def curve32(sphere, sol32):
    return build_profile_curve(sphere, sol32)


@pytest.fixture(scope="session")
def mesh32(sphere, sol32):
    return build_mesh(sphere, sol32, 600, 120)


@pytest.fixture(scope="session")
def diag32(mesh32):
    return curvature_diagnostics(mesh32)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
