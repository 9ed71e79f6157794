import pytest

from avgmomentum import marchenko_pastur, uniform_measure


@pytest.fixture(scope="session")
def mp():
    return marchenko_pastur(1.0, 0.5)


@pytest.fixture(scope="session")
def unif():
    return uniform_measure(1.0, 2.0)


@pytest.fixture(scope="session", params=["mp", "uniform"])
def default_measure(request):
    if request.param == "mp":
        return marchenko_pastur(1.0, 0.5)
    return uniform_measure(1.0, 2.0)


VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(VERDICTS, [])

    def record(number, name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("]")[1].split(".")[0])):
            terminalreporter.write_line(line)
