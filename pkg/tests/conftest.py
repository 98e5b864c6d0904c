from importlib import resources
from pathlib import Path

import pytest
from hypothesis import strategies as st

from stretchstab.robot_model import RobotSpec, stretch_re1

DATA = Path(str(resources.files("stretchstab") / "data"))


@pytest.fixture
def stretch():
    return stretch_re1()


@pytest.fixture
def data_dir():
    return DATA


@st.composite
def valid_specs(draw):
    """Random lumped-COM specs satisfying every RobotSpec invariant."""
    l = draw(st.floats(0.05, 1.0))
    return RobotSpec(
        m_r=draw(st.floats(1.0, 200.0)),
        w=draw(st.floats(0.05, 1.0)),
        l=l,
        c=l * draw(st.floats(0.05, 0.95)),
        t=draw(st.floats(0.0, 0.05)),
        D=draw(st.floats(0.1, 2.0)),
        H=draw(st.floats(0.2, 2.0)),
        g=draw(st.sampled_from([9.807, 9.81, 1.62])),
    )


_ACCEPTANCE: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.failed):
        _ACCEPTANCE[label] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"[{_ACCEPTANCE[label]}] {label}")
