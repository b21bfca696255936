import numpy as np
import pytest

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    outcome = "PASS" if call.excinfo is None else "FAIL"
    previous = _CRITERIA.get(number)
    if previous is None or previous[1] == "PASS":
        _CRITERIA[number] = (title, outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {outcome}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def initial_state():
    return np.array([1 / np.sqrt(2), (1 + 1j) / 2])
