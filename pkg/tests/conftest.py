import pytest

from windaoa.synth import SynthSpec, generate

_labels = {}
_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            number, title = m.args
            _labels[item.nodeid] = (number, title)


def pytest_runtest_logreport(report):
    if report.nodeid not in _labels:
        return
    failed = report.outcome == "failed" or (report.when == "setup" and report.outcome == "skipped")
    if failed:
        _results[report.nodeid] = "FAIL"
    elif report.when == "call":
        _results.setdefault(report.nodeid, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, status in sorted(_results.items(), key=lambda kv: _labels[kv[0]][0]):
        number, title = _labels[nodeid]
        terminalreporter.write_line(f"[{status}] AC{number:02d} {title}")


@pytest.fixture(scope="session")
def intermittent_1e6():
    return generate(SynthSpec(kind="intermittent", n=1_000_000, seed=20240601))


@pytest.fixture(scope="session")
def gaussian_1e6():
    return generate(SynthSpec(kind="gaussian", n=1_000_000, seed=7, u_mean=10.0, u_sigma=1.0))
