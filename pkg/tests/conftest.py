import oracles


def pytest_terminal_summary(terminalreporter):
    if oracles.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in oracles.VERDICTS:
            terminalreporter.write_line(line)
