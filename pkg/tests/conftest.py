import pytest

from dkspectra.graphs import parse_family

CORPUS = ["K:2", "K:3", "P:3", "P:4", "C:5", "S:3"]

_criteria: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def corpus():
    return [parse_family(s) for s in CORPUS]


@pytest.fixture(params=CORPUS)
def graph(request):
    return parse_family(request.param)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        n, title = marker
        previous = _criteria.get(n, (title, "PASS"))[1]
        status = "PASS" if report.passed and previous == "PASS" else "FAIL"
        _criteria[n] = (title, status)


def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m:
        item.user_properties.append(("criterion", (m.args[0], m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status = _criteria[n]
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")
