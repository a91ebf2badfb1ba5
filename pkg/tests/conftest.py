"""Acceptance bookkeeping: one PASS/FAIL line per criterion in the terminal summary."""
import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.fixture
def note(request):
    """Attach measured values to the criterion line of the running test."""
    marker = request.node.get_closest_marker("criterion")
    lines = _RESULTS.setdefault(marker.args[0], {"title": marker.args[1], "notes": [], "ok": None})["notes"]
    return lines.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    entry = _RESULTS.setdefault(marker.args[0], {"title": marker.args[1], "notes": [], "ok": None})
    passed = rep.passed if rep.when == "call" else False
    entry["ok"] = passed if entry["ok"] is None else entry["ok"] and passed
    if rep.when == "call":
        entry["seconds"] = entry.get("seconds", 0.0) + rep.duration


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        e = _RESULTS[n]
        status = "PASS" if e["ok"] else "FAIL"
        extra = "; ".join(e["notes"])
        terminalreporter.write_line(f"criterion {n:2d} {status}  {e['title']} ({e.get('seconds', 0.0):.2f} s)"
                                    + (f"  [{extra}]" if extra else ""))
