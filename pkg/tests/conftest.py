import pytest

_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Append (passed, text) pairs; they are printed in the terminal summary."""
    log = request.config.stash[_KEY]

    def record(passed: bool, text: str) -> bool:
        log.append((bool(passed), text))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_KEY, [])
    if not log:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for passed, text in log:
        terminalreporter.write_line("%s  %s" % ("PASS" if passed else "FAIL", text))
    n_fail = sum(1 for passed, _ in log if not passed)
    terminalreporter.write_line("%d checks, %d failed" % (len(log), n_fail))
