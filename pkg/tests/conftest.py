import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qfano_lattice.models import QFanoScenario  # noqa: E402
from qfano_lattice.pipeline import build_standard_scenario  # noqa: E402

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "seen": False})
    if rep.when == "call" or rep.failed:
        entry["seen"] = True
        entry["ok"] = entry["ok"] and not rep.failed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        status = "PASS" if e["ok"] and e["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {e['title']}")


@pytest.fixture(scope="session")
def takagi():
    return QFanoScenario(4, 4, 1)


@pytest.fixture(scope="session")
def takagi_std(takagi):
    return build_standard_scenario(takagi)
