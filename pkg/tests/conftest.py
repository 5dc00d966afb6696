_criteria = {}


def pytest_runtest_logreport(report):
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if not marker:
        return
    number, title = marker
    ok = report.outcome == "passed"
    if report.when == "call" or not ok:
        previous = _criteria.get(number, (title, True))[1]
        _criteria[number] = (title, previous and ok)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            item.user_properties.append(("acceptance", (mark.kwargs["number"], mark.kwargs["title"])))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
