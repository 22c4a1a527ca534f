import pytest

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, {"title": title, "status": "PASS", "detail": []})
    if report.skipped:
        if entry["status"] == "PASS":
            entry["status"] = "SKIP"
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
        entry["detail"].append(reason.removeprefix("Skipped: "))
    elif report.failed:
        entry["status"] = "FAIL"
    if report.when == "call":
        entry["detail"].extend(f"{k}={v}" for k, v in item.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        detail = "; ".join(entry["detail"])
        line = f"criterion {number:>2} {entry['status']:<4} {entry['title']}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
