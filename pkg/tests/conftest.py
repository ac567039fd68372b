import pytest

ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def emit(request, capsys):
    """Print a verdict line past output capture and keep it for the final summary."""

    def write(line):
        request.config.stash[ACCEPTANCE_LINES].append(line)
        with capsys.disabled():
            print(f"\n{line}", end=" ")

    return write


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
