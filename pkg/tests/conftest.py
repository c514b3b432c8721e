import pytest

from plasticity import fibonacci, thue_morse

ACCEPTANCE_LINES = []

FIB_TEXT = "alphabet: a b\nrule: a -> a b\nrule: b -> a\n"
TM_TEXT = "# Thue-Morse\nalphabet: a b\nrule: a -> a b\nrule: b -> b a\n"


@pytest.fixture(scope="session")
def fib():
    return fibonacci()


@pytest.fixture(scope="session")
def tm():
    return thue_morse()


@pytest.fixture
def fib_file(tmp_path):
    p = tmp_path / "fib.sub"
    p.write_text(FIB_TEXT)
    return str(p)


@pytest.fixture
def tm_file(tmp_path):
    p = tmp_path / "tm.sub"
    p.write_text(TM_TEXT)
    return str(p)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
