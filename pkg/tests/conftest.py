import helpers


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not helpers.RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, passed, text in sorted(helpers.RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {text}")
